#pragma once

#include <vector>

#include "equiconv/parallel.hpp"
#include "equiconv/types.hpp"

// Finite Fourier coefficient sequences on the circle [0, 2 pi) in the
// orthonormal basis e_l(x) = exp(i l x)/sqrt(2 pi).
namespace equiconv::torus {

enum class Kind { Pseudofunction, SmoothMultiplier };

struct CoefficientSequence {
    int M = 0;  // support [-M, M]
    CVec c;     // c[l + M]
    Kind kind = Kind::Pseudofunction;

    CoefficientSequence() : c(1, cplx{0.0}) {}
    explicit CoefficientSequence(int M, Kind kind = Kind::Pseudofunction);

    cplx operator[](int l) const { return (l < -M || l > M) ? cplx{0.0} : c[static_cast<std::size_t>(l + M)]; }
    cplx& at(int l);

    static CoefficientSequence single_mode(int l, cplx value, int M, Kind kind = Kind::Pseudofunction);
};

CoefficientSequence pf_partial_sum(const CoefficientSequence& F, double r);

struct Norms {
    double a_norm = 0.0;             // sum |c_l|
    double pf_norm = 0.0;            // sup |c_l|
    double derivative_a_norm = 0.0;  // sum |l| |c_l|
};

Norms norms(const CoefficientSequence& s);

// Coefficients of the pointwise product: (1/sqrt(2 pi)) times the discrete convolution.
CoefficientSequence multiply(const CoefficientSequence& gamma, const CoefficientSequence& F,
                             Exec exec = Exec::Parallel);

// S_r(gamma F) - gamma S_r(F).
CoefficientSequence commutator(const CoefficientSequence& F, const CoefficientSequence& gamma, double r,
                               Exec exec = Exec::Parallel);

// ||gamma_K S_r(F)||_A, an upper bound for the A(K) seminorm of S_r(F).
double localization_bound(const CoefficientSequence& F, const CoefficientSequence& gamma_K, double r,
                          Exec exec = Exec::Parallel);

cplx evaluate(const CoefficientSequence& s, double x);

// Coefficients of the point mass at x0, truncated to [-M, M].
CoefficientSequence point_mass(double x0, int M = 512);

// Integrable spike |x - x0|^{-1/2} cos^2(pi (x - x0)/(2 w)) on |x - x0| < w.
CoefficientSequence spike(double x0, int M = 512, double w = 0.1);

// Smooth multiplier equal to 0 within `inner` of x0, 1 beyond `outer`, raised cosine in between.
CoefficientSequence raised_cosine_cutoff(double x0, double inner = 0.1, double outer = 0.2, int M = 256);

struct LocalizationRow {
    double r = 0.0;
    double bound = 0.0;
    double a_norm = 0.0;   // ||S_r(F)||_A
    double pf_norm = 0.0;  // ||S_r(F)||_PF
};

// Spike at x0 = pi, cutoff at distance >= 0.2, radii 2 pi {10, 20, 40, 80} by default.
std::vector<LocalizationRow> localization_demo(const RVec& radii = {}, int M = 512, Exec exec = Exec::Parallel);

} // namespace equiconv::torus
