#pragma once

#include <string>
#include <vector>

#include "equiconv/expansion.hpp"
#include "equiconv/linalg.hpp"
#include "equiconv/model.hpp"

// Whole-interval equiconvergence: alpha and beta numbers, the functions
// Phi_k and Psi_k, the singular integrals I_r, reports and the order-two and
// odd-order reductions.
namespace equiconv::criterion {

using Table = linalg::CMat;

struct AlphaTable {
    int n = 0;
    int q = 0;
    cplx Theta{0.0};
    Table cofactors;  // cofactors[nu][k] of the Theta matrix
    Table d;          // d[m][nu]
    Table alpha;      // alpha[m][k]
    double laplace_residual = 0.0;  // relative residual of the cofactor expansion
};

AlphaTable alpha_numbers(const model::OperatorSpec& op);

struct PhiPsi {
    std::vector<model::SampledFunction> Phi;  // k = 0..n-1
    std::vector<model::SampledFunction> Psi;
};

// Phi_k = alpha_{qk} f0 + alpha_{0k} f0#, Psi_k = alpha_{n-1,k} f0 + alpha_{q-1,k} f0#.
PhiPsi phi_psi(const model::SampledFunction& f0, const Table& alpha, int n);

Table beta_numbers(const model::OperatorSpec& op1, const model::OperatorSpec& op2);

struct Nondegeneracy {
    cplx det1{0.0};  // det[[b00, bq0], [b0q, bqq]]
    cplx det2{0.0};  // det[[b_{q-1,q-1}, b_{n-1,q}], [b_{q-1,n-1}, b_{n-1,n-1}]]
    bool span_phi = false;  // span(Phi_0, Phi_q) = span(f0, f0#)
    bool span_psi = false;  // span(Psi_{q-1}, Psi_{n-1}) = span(f0, f0#)
    bool span_ok = false;
    int base_rank = 0;      // dimension of span(f0, f0#)
    std::string psi_pair = "Psi_{q-1},Psi_{n-1}";
};

Nondegeneracy nondegeneracy(const Table& table, int n, const model::SampledFunction& f0);

// I_r^{+-}(f0)(x) = int_{1/r}^1 (x + xi)^{-1} exp(+-i r xi) f0(xi) dxi.
CVec I_r(const model::SampledFunction& f0, double r, int sign, const RVec& x, Exec exec = Exec::Parallel,
         double tol = 1e-10);

enum class Verdict { ConsistentWithEquiconvergence, ConsistentWithDivergence, Indeterminate };
std::string to_string(Verdict v);

enum class SumMethod { Auto, Contour, Residue };

struct ReportOptions {
    RVec grid = uniform_grid(100);
    double decay_factor = 0.25;
    double quad_tol = 1e-10;
    SumMethod method = SumMethod::Auto;  // Auto: contour for model operators, residues otherwise
    Exec exec = Exec::Parallel;
};

struct Curve {
    std::string name;
    RVec values;  // one per radius
    bool decreased = false;
};

struct EquiconvergenceReport {
    std::string mode;  // "single-op" or "pair-op"
    std::vector<std::string> labels;
    Table alpha;       // alpha of L (single) or beta (pair)
    bool alpha_from_square = false;
    PhiPsi functions;
    Nondegeneracy nondeg;
    RVec radii;
    std::vector<int> k;
    std::vector<Curve> curves;          // I_r of f0, f0#, the Phi/Psi curves, then the direct difference
    std::string verdict_family = "f0";  // "f0" when nondegenerate, else "phi-psi"
    Verdict verdict = Verdict::Indeterminate;
};

// Raises AdmissibilityFailed when f violates an order-zero row by more than 1e-8.
void check_admissible(const model::OperatorSpec& op, const model::SampledFunction& f);

EquiconvergenceReport whole_interval_report(const std::vector<model::OperatorSpec>& ops,
                                            const model::SampledFunction& f,
                                            const expansion::RadiusSchedule& schedule,
                                            const ReportOptions& opt = {});

// Partial sum by the requested method.
expansion::PartialSumResult partial_sum(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                                        const RVec& x, SumMethod method, Exec exec = Exec::Parallel);

struct IdentityOptions {
    RVec grid = uniform_grid(100);
    bool printed_sign = false;  // use +2 pi as printed instead of the verified -2 pi
    SumMethod method = SumMethod::Auto;
    Exec exec = Exec::Parallel;
};

// sup_x |S_r(f) - sigma_r(f~) - s 2 pi (sigma_r(Phi_0)(-x) + sigma_r(Phi_1)(x-1))|.
double second_order_identity_residual(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                                      const IdentityOptions& opt = {});

struct OddConvention {
    std::string delta;   // "exp(chi/m)", "exp(2 pi i chi/m)", "exp(-2 pi i chi/m)"
    bool ratio_printed;  // theta(b1,b0)/theta(b0,b1) as printed, else the inverse
    bool roots_printed;  // eps_q and eps_{m-1/2} over 2m-th roots as printed, else eps_q over m-th roots
    std::string describe() const;
};

struct OddReduction {
    int m = 0;
    cplx delta{0.0};
    cplx Omega{0.0};
    CVec closed;  // alpha_00, alpha_{m-1,m-1}, alpha_mm, alpha_{n-1,n-1} of L^2
    CVec direct;
    double discrepancy = 0.0;          // for the pinned convention
    double printed_discrepancy = 0.0;  // for the printed convention
    OddConvention convention;
    double parity_max = 0.0;  // max |alpha_tk(L^2)| over t + k odd
    AlphaTable square_table;
};

OddReduction odd_reduction(const model::OperatorSpec& op);

} // namespace equiconv::criterion
