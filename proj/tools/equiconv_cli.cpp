#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "equiconv/cli.hpp"
#include "equiconv/errors.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("equiconv");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("EQUICONV_LOG");
    const std::string level = env ? env : "error";
    if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else if (level == "info")
        spdlog::set_level(spdlog::level::info);
    else
        spdlog::set_level(spdlog::level::err);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenfunction expansions and equiconvergence experiments"};
    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    double tol = 0.0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized demos");
    auto* tol_opt = app.add_option("--tol", tol, "Quadrature tolerance override");
    app.add_option("--threads", threads, "OpenMP thread count (0 keeps the runtime default)");
    CLI11_PARSE(app, argc, argv);

    setup_logging();
    try {
        auto cfg = equiconv::cli::load_config(config_path);
        if (*seed_opt) cfg.seed = seed;
        if (*tol_opt) {
            if (!(tol > 0.0 && tol <= 1e-2)) equiconv::fail("ConfigInvalid", "--tol: must be in (0, 1e-2]");
            cfg.tol = tol;
        }
        if (threads < 0) equiconv::fail("ConfigInvalid", "--threads: must be nonnegative");
        if (threads > 0) omp_set_num_threads(threads);
        auto res = equiconv::cli::run(cfg, out_dir);
        for (const auto& f : res.files) spdlog::info("wrote {}", f.string());
        std::cout << res.summary << std::endl;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << equiconv::cli::error_json(e) << std::endl;
        return equiconv::cli::exit_code(e);
    }
}
