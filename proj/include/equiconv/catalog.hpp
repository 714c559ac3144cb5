#pragma once

#include <random>
#include <string>
#include <vector>

#include "equiconv/model.hpp"

// Named operators used by tests, the acceptance suite and shipped configs.
namespace equiconv::catalog {

model::OperatorSpec dirichlet2();
model::OperatorSpec neumann2();
model::OperatorSpec periodic2();
// y(0) = y'(0) = 0: both conditions at one endpoint.
model::OperatorSpec decomposing2();
// Regular n=2 with non-self-adjoint rows {y(0)+2y(1)=0, Dy(0)-Dy(1)=0}.
model::OperatorSpec skew2();
// n=4, y = y' = 0 at both endpoints.
model::OperatorSpec clamped4();
// D^2 + x with Dirichlet rows.
model::OperatorSpec dirichlet2_linear_potential();

// Random normalized rows for order n: orders are drawn with multiplicities
// r_j in {0,1,2} summing to n, leading coefficients are random complex.
model::NormalizedBoundaryConditions random_bc(int n, std::mt19937_64& rng);

struct NamedFunction {
    std::string name;
    model::SampledFunction f;
};

// Five expandees: smooth with zero endpoints, step, complex trigonometric,
// compactly supported bump, kink.
std::vector<NamedFunction> test_functions();

// The whole-interval example: indicator of [0.2, 0.8] times (1 + x).
model::SampledFunction whole_interval_f0();

} // namespace equiconv::catalog
