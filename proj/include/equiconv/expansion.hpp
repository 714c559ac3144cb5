#pragma once

#include <string>
#include <vector>

#include "equiconv/model.hpp"
#include "equiconv/parallel.hpp"
#include "equiconv/solver.hpp"

namespace equiconv::expansion {

enum class Method { Contour, Residue, Dirichlet, FourierSeries };
std::string to_string(Method m);

// Where the factor n rho^{n-1} sits in the contour integral. `Lambda` integrates
// G(f) d lambda; `Rho` integrates G(f) d rho and is kept for comparison only.
enum class ContourMeasure { Lambda, Rho };

struct RadiusSchedule {
    double alpha = 0.0;
    std::vector<int> k;
    RVec radii;          // r_k = 2 pi k + alpha
    double separation = 0.0;
};

// Picks alpha on a 64-step scan of [0, 2 pi) maximizing the distance from the
// circles |rho| = r_k to every characteristic value.
RadiusSchedule choose_radii(const std::vector<solver::CharValueSet>& sets, int k_min, int k_max,
                            double eps_min = 0.3);
RadiusSchedule choose_radii(const std::vector<model::OperatorSpec>& ops, int k_min, int k_max,
                            double eps_min = 0.3, const solver::SearchOptions& search = {});

struct PartialSumResult {
    RVec x;
    CVec values;
    Method method = Method::Contour;
    double r = 0.0;
    std::string label;
};

// Dirichlet integral (1/pi) int sin r(x-xi)/(x-xi) f(xi) dxi over the support
// of the extension of f. Points of x may lie outside [0,1].
PartialSumResult sigma_r(const model::SampledFunction& f, double r, const RVec& x, Exec exec = Exec::Parallel,
                         double tol = 1e-11);

// Trigonometric Fourier partial sum over e_j = exp(2 pi i j x), |j| <= r / 2 pi.
PartialSumResult sigma_r_pi(const model::SampledFunction& f, double r, const RVec& x, double tol = 1e-12);

struct ContourOptions {
    ContourMeasure measure = ContourMeasure::Lambda;
    bool free_term = false;         // integrate only the fundamental-kernel part
    int min_nodes = 64;
    double nodes_per_radius = 8.0;
    Exec exec = Exec::Parallel;
    solver::NumericOptions numeric{};
};

// Partial sum as the contour integral of the resolvent over Gamma_r.
PartialSumResult S_r_contour(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                             const RVec& x, const ContourOptions& opt = {});

struct ResidueOptions {
    int nodes = 32;
    double gap_fraction = 0.1;
    Exec exec = Exec::Parallel;
    solver::NumericOptions numeric{};
};

// Partial sum as the sum of spectral projections for |rho_j| < r, each from a
// small circle integral of the resolvent.
PartialSumResult S_r_residues(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                              const RVec& x, const solver::CharValueSet& cv, const ResidueOptions& opt = {});

// Remainder kernel L_r(x, xi, t) for even n >= 4.
cplx oskina_kernel(int n, double r, double x, double xi, double t);

// Roots of unity entering the sums I_1, I_2 of the kernel.
CVec oskina_roots(int n);

} // namespace equiconv::expansion
