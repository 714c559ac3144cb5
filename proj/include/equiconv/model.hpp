#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "equiconv/types.hpp"

namespace equiconv::model {

enum class CoefficientKind { Polynomial, Step, Samples };

// Descriptor of one coefficient p_k(x) on [0,1].
struct CoefficientDescriptor {
    CoefficientKind kind = CoefficientKind::Polynomial;
    CVec poly;          // ascending powers of x
    RVec step_breaks;   // 0 = x_0 < x_1 < ... < x_m = 1
    CVec step_values;   // value on [x_{i}, x_{i+1}), m entries
    CVec samples;       // values on a uniform grid of [0,1], linear interpolation
    bool smooth = false;

    static CoefficientDescriptor polynomial(CVec coeffs, bool smooth = true);
    static CoefficientDescriptor step(RVec breaks, CVec values);
    static CoefficientDescriptor dense(CVec samples, bool smooth = false);

    cplx operator()(double x) const;
    // Interior points of (0,1) where the coefficient may be discontinuous.
    RVec breakpoints() const;
    bool is_zero() const;
};

struct DifferentialExpression {
    int n = 2;
    std::map<int, CoefficientDescriptor> coefficients;

    // p_k(x); zero when the coefficient is absent.
    cplx p(int k, double x) const;
    // True when every coefficient vanishes identically (the model operator D^n).
    bool is_model() const;
    RVec breakpoints() const;
    void validate() const;
};

struct LowerTerm {
    int order = 0;
    cplx at0{0.0};
    cplx at1{0.0};
};

struct BoundaryRow {
    int sigma = 0;
    cplx a{0.0};  // coefficient of D^sigma y(0)
    cplx b{0.0};  // coefficient of D^sigma y(1)
    std::vector<LowerTerm> lower;
};

struct NormalizedBoundaryConditions {
    std::vector<BoundaryRow> rows;

    int n() const { return static_cast<int>(rows.size()); }
    // r_j for j = 0..n-1.
    std::vector<int> multiplicities() const;
    // Total order chi = sum_j j r_j.
    int chi() const;
    void validate() const;
};

struct OperatorSpec {
    DifferentialExpression expr;
    NormalizedBoundaryConditions bc;
    std::string label;

    int n() const { return expr.n; }
    void validate() const;
};

// A general two-point form sum_j at0[j] D^j y(0) + at1[j] D^j y(1).
struct RawForm {
    CVec at0;
    CVec at1;
};

NormalizedBoundaryConditions normalize_bc(const std::vector<RawForm>& forms);
std::vector<RawForm> to_raw_forms(const NormalizedBoundaryConditions& bc);

enum class Domain { UnitInterval, RealLineExtended };
enum class Extension { Zero, ConstantEndpoints, None };

// A function on [0,1] given by an evaluator plus its samples on a uniform grid.
// Outside [0,1] the extension rule applies.
class SampledFunction {
public:
    using Evaluator = std::function<cplx(double)>;

    SampledFunction();
    SampledFunction(Evaluator f, std::size_t N = 400, RVec breakpoints = {},
                    Domain domain = Domain::UnitInterval, Extension extension = Extension::Zero);

    cplx operator()(double x) const;
    cplx raw(double x) const { return f_(x); }

    std::size_t N() const { return samples_.size() - 1; }
    const CVec& samples() const { return samples_; }
    RVec grid() const { return uniform_grid(N()); }
    const RVec& breakpoints() const { return breakpoints_; }
    Domain domain() const { return domain_; }
    Extension extension() const { return extension_; }
    const Evaluator& evaluator() const { return f_; }

    SampledFunction with_extension(Extension e, Domain d) const;

private:
    friend SampledFunction reflect(const SampledFunction& f);

    Evaluator f_;
    CVec samples_;
    RVec breakpoints_;
    Domain domain_ = Domain::UnitInterval;
    Extension extension_ = Extension::Zero;
};

SampledFunction linear_combination(cplx a, const SampledFunction& f, cplx b, const SampledFunction& g);
SampledFunction scaled(cplx a, const SampledFunction& f);

SampledFunction reflect(const SampledFunction& f);
SampledFunction extend_tilde(const SampledFunction& f);

struct EndpointSplit {
    SampledFunction P;
    SampledFunction f0;
};
EndpointSplit split_endpoint(const SampledFunction& f);

struct SubleadingElimination {
    DifferentialExpression expr;
    SampledFunction V;
};
SubleadingElimination eliminate_subleading(const DifferentialExpression& expr);

using Integrand = std::function<cplx(double)>;

// Composite Gauss-Legendre (order 12) with panel halving until two successive
// estimates agree to tol. Breakpoints inside (a,b) become panel edges.
cplx quad(const Integrand& f, double a, double b, double rate, double tol = 1e-10,
          const RVec& breakpoints = {});

// Fixed composite rule used by kernels that reuse nodes across many integrands.
struct QuadRule {
    RVec nodes;
    RVec weights;
};
QuadRule gauss_legendre(int order);
QuadRule composite_rule(double a, double b, const RVec& edges, double max_width, int order = 12);

enum class Sector { S1, S2 };

struct SpectralPoint {
    cplx lambda;
    cplx rho;
    Sector sector;
};

// Applies the rho branch rule for order n and classifies the sector.
SpectralPoint spectral_point(cplx lambda, int n);

} // namespace equiconv::model
