#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "equiconv/io.hpp"
#include "equiconv/model.hpp"
#include "equiconv/parallel.hpp"

// Experiment configuration and command dispatch for the equiconv tool.
namespace equiconv::cli {

struct ScheduleConfig {
    int k_min = 5;
    int k_max = 25;
    RVec radii;  // explicit radii override k_min..k_max
    double eps_min = 0.3;
};

struct SpectrumConfig {
    double R = 60.0;
    double strip = 6.0;
};

struct TorusConfig {
    int M = 512;
    RVec multipliers{10.0, 20.0, 40.0, 80.0};  // r = 2 pi * multiplier
    int trials = 0;                            // random commutator-bound trials
};

struct SchrodingerConfig {
    std::string potential = "zero";  // zero | box | bump
    double height = 0.0;
    double radius = 0.0;
    double h = 1.0;  // +infinity selects the Dirichlet condition; JSON "inf"
    double b_max = 40.0;
    int N = 6000;
    RVec t_list{25.0, 100.0, 400.0};
    double b = 1.0;
    int grid = 20;
};

struct OskinaConfig {
    int n = 4;
    RVec r_list{10.0, 20.0, 40.0, 80.0};
    double x = 0.4;
    double xi = 0.4;
    double t = 0.7;
};

struct RandomConfig {
    int count = 0;
    std::vector<int> n_values{2, 3};
};

struct ExperimentConfig {
    std::string command;
    std::vector<model::OperatorSpec> operators;
    std::optional<io::FunctionDescriptor> function;
    ScheduleConfig schedule;
    int grid = 100;  // grid + 1 points on [0, 1]
    std::vector<std::string> methods{"contour", "residue"};
    std::string sum_method = "auto";  // auto | contour | residue
    double tol = 1e-10;
    double decay_factor = 0.25;
    SpectrumConfig spectrum;
    TorusConfig torus;
    SchrodingerConfig schrodinger;
    OskinaConfig oskina;
    RandomConfig random;
    std::uint64_t seed = 1;
};

ExperimentConfig config_from_json(const io::json& j);
io::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunResult {
    std::string summary;  // one line for standard output
    std::vector<std::filesystem::path> files;
};

// Runs the configured command and writes its artifacts into out_dir.
RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir, Exec exec = Exec::Parallel);

// Process exit code for an error: 2 for domain errors, 1 otherwise.
int exit_code(const std::exception& e);

// Machine-readable error object for standard error.
std::string error_json(const std::exception& e);

} // namespace equiconv::cli
