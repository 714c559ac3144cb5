#include "equiconv/catalog.hpp"

namespace equiconv::catalog {

namespace {

model::OperatorSpec make(int n, std::vector<model::BoundaryRow> rows, std::string label) {
    model::OperatorSpec op;
    op.expr.n = n;
    op.bc.rows = std::move(rows);
    op.label = std::move(label);
    return op;
}

} // namespace

model::OperatorSpec dirichlet2() { return make(2, {{0, 1.0, 0.0, {}}, {0, 0.0, 1.0, {}}}, "dirichlet"); }

model::OperatorSpec neumann2() { return make(2, {{1, 1.0, 0.0, {}}, {1, 0.0, 1.0, {}}}, "neumann"); }

model::OperatorSpec periodic2() { return make(2, {{0, 1.0, -1.0, {}}, {1, 1.0, -1.0, {}}}, "periodic"); }

model::OperatorSpec decomposing2() { return make(2, {{0, 1.0, 0.0, {}}, {1, 1.0, 0.0, {}}}, "decomposing"); }

model::OperatorSpec skew2() { return make(2, {{0, 1.0, 2.0, {}}, {1, 1.0, -1.0, {}}}, "skew"); }

model::OperatorSpec clamped4() {
    return make(4, {{0, 1.0, 0.0, {}}, {0, 0.0, 1.0, {}}, {1, 1.0, 0.0, {}}, {1, 0.0, 1.0, {}}}, "clamped4");
}

model::OperatorSpec dirichlet2_linear_potential() {
    auto op = dirichlet2();
    op.expr.coefficients[0] = model::CoefficientDescriptor::polynomial({0.0, 1.0});
    op.label = "dirichlet+x";
    return op;
}

model::NormalizedBoundaryConditions random_bc(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<int> r(static_cast<std::size_t>(n), 0);
    int placed = 0;
    while (placed < n) {
        int j = pick(rng);
        if (r[static_cast<std::size_t>(j)] < 2) {
            ++r[static_cast<std::size_t>(j)];
            ++placed;
        }
    }
    model::NormalizedBoundaryConditions bc;
    for (int j = 0; j < n; ++j) {
        if (r[static_cast<std::size_t>(j)] == 2) {
            bc.rows.push_back({j, 1.0, 0.0, {}});
            bc.rows.push_back({j, 0.0, 1.0, {}});
        } else if (r[static_cast<std::size_t>(j)] == 1) {
            // Occasionally a one-sided row, which often makes the problem irregular.
            std::uniform_int_distribution<int> kind(0, 5);
            int k = kind(rng);
            cplx b{g(rng), g(rng)};
            if (k == 0) bc.rows.push_back({j, 1.0, 0.0, {}});
            else if (k == 1) bc.rows.push_back({j, 0.0, 1.0, {}});
            else bc.rows.push_back({j, 1.0, b, {}});
        }
    }
    return bc;
}

std::vector<NamedFunction> test_functions() {
    using model::SampledFunction;
    std::vector<NamedFunction> out;
    out.push_back({"poly", SampledFunction([](double x) { return cplx{x * (1.0 - x) * (1.0 + 0.5 * x)}; })});
    out.push_back({"step", SampledFunction([](double x) { return cplx{x >= 0.3 && x < 0.6 ? 1.0 : 0.2}; }, 400,
                                           {0.3, 0.6})});
    out.push_back({"trig", SampledFunction([](double x) { return std::exp(2.0 * kI * x) + 0.5; })});
    out.push_back({"bump", SampledFunction(
                               [](double x) {
                                   const double u = (x - 0.5) / 0.3;
                                   return cplx{std::abs(u) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0};
                               },
                               400, {0.2, 0.8})});
    out.push_back({"kink", SampledFunction([](double x) { return cplx{std::abs(x - 0.45)}; }, 400, {0.45})});
    return out;
}

model::SampledFunction whole_interval_f0() {
    return model::SampledFunction([](double x) { return cplx{x >= 0.2 && x <= 0.8 ? 1.0 + x : 0.0}; }, 400,
                                  {0.2, 0.8});
}

} // namespace equiconv::catalog
