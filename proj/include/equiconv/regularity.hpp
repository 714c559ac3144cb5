#pragma once

#include <optional>
#include <string>

#include "equiconv/model.hpp"

namespace equiconv::regularity {

enum class Verdict { Regular, Irregular };

struct RegularityReport {
    cplx theta_01;
    std::optional<cplx> theta_10;  // odd n only
    double scale_01 = 1.0;
    double scale_10 = 1.0;
    int chi = 0;
    Verdict verdict = Verdict::Irregular;
    bool n_even = true;
};

// eps_t = exp(2 pi i t / n); fractional t allowed.
cplx unit_root(int n, double t);
CVec unit_roots(int n);

// Matrix whose determinant is theta(b0,b1,L) (swap=false) or theta(b1,b0,L).
// Rows follow the stored bc order; columns k < q take the coefficient at one
// endpoint, columns k >= q the other.
std::vector<CVec> theta_matrix(const model::NormalizedBoundaryConditions& bc, bool swap);
cplx birkhoff_theta(const model::NormalizedBoundaryConditions& bc, bool swap);
// Hadamard bound of the theta matrix: product of Euclidean row norms.
double theta_scale(const model::NormalizedBoundaryConditions& bc, bool swap);

bool is_nonzero(cplx theta, double scale, double rel_tol = 1e-10);

RegularityReport classify(const model::OperatorSpec& op);

// Order-2n operator with forms {U_j(y), U_j(l(y))}, renormalized.
model::OperatorSpec square_operator(const model::OperatorSpec& op);

std::string to_string(Verdict v);

} // namespace equiconv::regularity
