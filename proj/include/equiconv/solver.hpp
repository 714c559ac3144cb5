#pragma once

#include <memory>
#include <vector>

#include "equiconv/linalg.hpp"
#include "equiconv/model.hpp"
#include "equiconv/ode.hpp"

namespace equiconv::solver {

enum class FssKind { ModelExponential, InitialValue };

// k is in the partition P when exp(i rho eps_k x) is bounded on [0,1]:
// Im(rho eps_k) > 0, or Im = 0 and Re > 0.
std::vector<bool> auto_partition(int n, cplx rho);

// Fundamental system of l(y) = lambda y.
struct Fss {
    FssKind kind = FssKind::ModelExponential;
    int n = 0;
    cplx rho{0.0};
    cplx lambda{0.0};
    CVec eps;
    std::vector<bool> in_P;       // model kind only
    std::vector<CVec> at0, at1;   // at0[j][k] = D^j y_k(0), at1[j][k] = D^j y_k(1)

    // Model kind: y_k(x) = exp(i rho eps_k x).
    cplx y(int k, double x) const;
    // z_k(x) = y_k(x) for k in P, y_k(x-1) otherwise; |z_k| <= 1 when rho is in S_0.
    cplx z(int k, double x) const;
    // u_m(xi) = y_m(1-xi) for m in P, y_m(-xi) otherwise.
    cplx u(int m, double xi) const;
};

Fss model_fss(int n, cplx rho);
Fss model_fss(int n, cplx rho, std::vector<bool> partition);

struct NumericOptions {
    double tol = 1e-11;
    double rho_cap = 2.0 * kPi * 30.0;
};

// Initial-value basis D^i y_k(0) = delta_ik by adaptive integration.
Fss numeric_fss(const model::DifferentialExpression& expr, cplx lambda, const NumericOptions& opt = {});

// Initial-value basis for D^n by its power series (entire in lambda).
Fss power_series_fss(int n, cplx lambda);

// U_nu applied to a function whose derivative tables at the endpoints are given
// as d0[j], d1[j] = D^j y(0), D^j y(1).
cplx apply_form(const model::BoundaryRow& row, const CVec& d0, const CVec& d1);

// eta[nu][k] = rho^{-sigma_nu} U_nu(z_k) for the model fundamental system.
linalg::CMat eta_matrix(const model::NormalizedBoundaryConditions& bc, const Fss& fss);

// Characteristic determinant. Model operators: det eta with the automatic
// partition. Others: det U_nu(y_k) of the initial-value basis at lambda = rho^n.
cplx char_det(const model::OperatorSpec& op, cplx rho, const NumericOptions& opt = {});
// Entire function of lambda with zeros at the eigenvalues.
cplx char_det_lambda(const model::OperatorSpec& op, cplx lambda, const NumericOptions& opt = {});

struct CharValue {
    cplx rho;         // representative in S_0
    cplx rho_search;  // representative found by the search (Re >= 0 for even n)
    cplx lambda;
    int multiplicity = 1;
    int progression = 0;
    double fit_residual = 0.0;
};

struct Progression {
    cplx c;
    std::size_t members = 0;
};

struct CharValueSet {
    double R = 0.0;
    std::vector<CharValue> values;  // sorted by |rho|
    std::vector<Progression> progressions;
};

struct SearchOptions {
    double strip = 6.0;       // half height of the search strip in the rho plane
    double inner = 1.0;       // half width of the central square handled in the lambda plane
    double cell = 2.0;        // initial cell width along the real axis
    int max_depth = 60;
    double polish_tol = 1e-10;
    NumericOptions numeric{1e-10, 2.0 * kPi * 30.0};
};

CharValueSet find_char_values(const model::OperatorSpec& op, double R, const SearchOptions& opt = {});

// Winding number of F around a closed polygon, by adaptive phase tracking.
// Throws WindingMismatch if F vanishes on the contour.
int winding_number(const std::function<cplx(cplx)>& F, const std::vector<cplx>& polygon, double scale_hint = 0.0);

// Green function of L - lambda, lambda = rho^n.
cplx green(const model::OperatorSpec& op, double x, double xi, cplx rho, const NumericOptions& opt = {});

// |det eta(rho) - Theta| for model rows.
double eta_residual(const model::OperatorSpec& op, cplx rho);

// Applies the resolvent to a fixed function on a fixed grid.
class Resolvent {
public:
    virtual ~Resolvent() = default;
    // n rho^{n-1} G(f)(x_i, rho), the integrand of the contour form in the rho plane.
    virtual CVec scaled_apply(cplx rho) const = 0;
    // G(f)(x_i) at lambda.
    virtual CVec apply_lambda(cplx lambda) const = 0;
    // The part g(f) of n rho^{n-1} G(f) built from the fundamental kernel alone,
    // without the boundary correction. Model operators only.
    virtual CVec free_term(cplx rho) const;
};

struct ResolventOptions {
    double rho_max = 1.0;        // largest |rho| the quadrature must resolve
    NumericOptions numeric{};
};

std::unique_ptr<Resolvent> make_resolvent(const model::OperatorSpec& op, const model::SampledFunction& f,
                                          const RVec& grid, const ResolventOptions& opt);

} // namespace equiconv::solver
