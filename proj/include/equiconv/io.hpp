#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "equiconv/model.hpp"

// JSON descriptors for operators and functions, CSV emission and atomic writes.
namespace equiconv::io {

using json = nlohmann::json;

// Raises ConfigInvalid with the field path in the message.
[[noreturn]] void config_error(const std::string& path, const std::string& what);

// A complex number is a JSON number or a two-element array [re, im].
cplx to_cplx(const json& j, const std::string& path);
json from_cplx(cplx z);

// Operators: {"catalog": name} or an explicit {"n", "label", "coefficients", "bc"} object.
// "bc" holds either "forms" ([{"at0": [...], "at1": [...]}]) or normalized "rows".
model::OperatorSpec operator_from_json(const json& j, const std::string& path);
json operator_to_json(const model::OperatorSpec& op);

struct FunctionTerm {
    std::string fn = "sin";  // sin | cos | exp | pow | indicator | bump
    cplx c{1.0};
    double k = 1.0;
    double phase = 0.0;
    double a = 0.0;  // the term vanishes outside [a, b]
    double b = 1.0;
};

// Either a catalog name or a sum of terms.
struct FunctionDescriptor {
    std::string catalog;  // poly, step, trig, bump, kink, whole_interval_f0, zero
    std::vector<FunctionTerm> terms;
    int N = 400;

    model::SampledFunction build() const;
};

FunctionDescriptor function_from_json(const json& j, const std::string& path);
json function_to_json(const FunctionDescriptor& f);

// Writes to a temporary sibling and renames it into place. Raises IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// 12 significant digits in scientific notation.
std::string format_number(double v);

struct PlotRow {
    int k = 0;
    double r = 0.0;
    std::string name;
    double value = 0.0;
};

// CSV with header k,r,name,value.
std::string plotdata_csv(const std::vector<PlotRow>& rows);
void emit_plotdata(const std::filesystem::path& path, const std::vector<PlotRow>& rows);

// Generic CSV with the given header; every cell is already formatted.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

} // namespace equiconv::io
