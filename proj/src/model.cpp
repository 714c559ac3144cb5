#include "equiconv/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "equiconv/errors.hpp"

namespace equiconv::model {

namespace {

cplx poly_eval(const CVec& c, double x) {
    cplx acc{0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

CVec poly_mul(const CVec& p, const CVec& q) {
    if (p.empty() || q.empty()) return {};
    CVec r(p.size() + q.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

CVec poly_add(const CVec& p, const CVec& q) {
    CVec r(std::max(p.size(), q.size()), cplx{0.0});
    for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
    for (std::size_t i = 0; i < q.size(); ++i) r[i] += q[i];
    return r;
}

CVec poly_scale(cplx a, const CVec& p) {
    CVec r(p);
    for (auto& c : r) c *= a;
    return r;
}

// D = -i d/dx applied to a polynomial.
CVec poly_D(const CVec& p) {
    if (p.size() <= 1) return {};
    CVec r(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) r[k - 1] = -kI * static_cast<double>(k) * p[k];
    return r;
}

CVec poly_antiderivative(const CVec& p) {
    CVec r(p.size() + 1, cplx{0.0});
    for (std::size_t k = 0; k < p.size(); ++k) r[k + 1] = p[k] / static_cast<double>(k + 1);
    return r;
}

double binomial(int k, int s) {
    double r = 1.0;
    for (int i = 1; i <= s; ++i) r = r * (k - s + i) / i;
    return r;
}

RVec merge_breakpoints(RVec a, const RVec& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](double u, double v) { return std::abs(u - v) < 1e-15; }), a.end());
    return a;
}

} // namespace

// ---------------------------------------------------------------- coefficients

CoefficientDescriptor CoefficientDescriptor::polynomial(CVec coeffs, bool smooth) {
    CoefficientDescriptor d;
    d.kind = CoefficientKind::Polynomial;
    d.poly = std::move(coeffs);
    d.smooth = smooth;
    return d;
}

CoefficientDescriptor CoefficientDescriptor::step(RVec breaks, CVec values) {
    if (breaks.size() != values.size() + 1 || values.empty())
        fail("ConfigInvalid", "step coefficient needs m values and m+1 breaks");
    CoefficientDescriptor d;
    d.kind = CoefficientKind::Step;
    d.step_breaks = std::move(breaks);
    d.step_values = std::move(values);
    d.smooth = false;
    return d;
}

CoefficientDescriptor CoefficientDescriptor::dense(CVec samples, bool smooth) {
    if (samples.size() < 2) fail("ConfigInvalid", "dense coefficient needs at least 2 samples");
    CoefficientDescriptor d;
    d.kind = CoefficientKind::Samples;
    d.samples = std::move(samples);
    d.smooth = smooth;
    return d;
}

cplx CoefficientDescriptor::operator()(double x) const {
    switch (kind) {
    case CoefficientKind::Polynomial:
        return poly_eval(poly, x);
    case CoefficientKind::Step: {
        auto it = std::upper_bound(step_breaks.begin() + 1, step_breaks.end() - 1, x);
        return step_values[static_cast<std::size_t>(it - (step_breaks.begin() + 1))];
    }
    case CoefficientKind::Samples: {
        const std::size_t N = samples.size() - 1;
        const double t = std::clamp(x, 0.0, 1.0) * static_cast<double>(N);
        const std::size_t i = std::min(static_cast<std::size_t>(t), N - 1);
        const double w = t - static_cast<double>(i);
        return samples[i] * (1.0 - w) + samples[i + 1] * w;
    }
    }
    return 0.0;
}

RVec CoefficientDescriptor::breakpoints() const {
    if (kind == CoefficientKind::Step && step_breaks.size() > 2)
        return RVec(step_breaks.begin() + 1, step_breaks.end() - 1);
    return {};
}

bool CoefficientDescriptor::is_zero() const {
    auto all_zero = [](const CVec& v) {
        return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx{0.0}; });
    };
    switch (kind) {
    case CoefficientKind::Polynomial: return all_zero(poly);
    case CoefficientKind::Step: return all_zero(step_values);
    case CoefficientKind::Samples: return all_zero(samples);
    }
    return true;
}

cplx DifferentialExpression::p(int k, double x) const {
    auto it = coefficients.find(k);
    return it == coefficients.end() ? cplx{0.0} : it->second(x);
}

bool DifferentialExpression::is_model() const {
    return std::all_of(coefficients.begin(), coefficients.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

RVec DifferentialExpression::breakpoints() const {
    RVec out;
    for (const auto& [k, c] : coefficients) out = merge_breakpoints(out, c.breakpoints());
    return out;
}

void DifferentialExpression::validate() const {
    if (n < 1) fail("ConfigInvalid", "order n must be >= 1");
    for (const auto& [k, c] : coefficients) {
        if (k < 0 || k >= n) fail("ConfigInvalid", "coefficient index out of range 0..n-1");
        if (k == n - 1 && !c.smooth && !c.is_zero())
            fail("ConfigInvalid", "p_{n-1} must be flagged smooth");
    }
}

// ------------------------------------------------------------ boundary rows

std::vector<int> NormalizedBoundaryConditions::multiplicities() const {
    std::vector<int> r(static_cast<std::size_t>(std::max(n(), 1)), 0);
    for (const auto& row : rows)
        if (row.sigma >= 0 && row.sigma < n()) ++r[static_cast<std::size_t>(row.sigma)];
    return r;
}

int NormalizedBoundaryConditions::chi() const {
    int chi = 0;
    for (const auto& row : rows) chi += row.sigma;
    return chi;
}

void NormalizedBoundaryConditions::validate() const {
    const int N = n();
    if (N < 1) fail("ConfigInvalid", "no boundary rows");
    auto r = multiplicities();
    for (const auto& row : rows) {
        if (row.sigma < 0 || row.sigma >= N) fail("ConfigInvalid", "boundary order out of range");
        for (const auto& t : row.lower)
            if (t.order < 0 || t.order >= row.sigma) fail("ConfigInvalid", "lower term order must be below sigma");
    }
    for (int j = 0; j < N; ++j) {
        if (r[static_cast<std::size_t>(j)] > 2) fail("ConfigInvalid", "more than two rows of one order");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (std::abs(row.a) == 0.0 && std::abs(row.b) == 0.0) fail("ConfigInvalid", "row with zero leading part");
        if (r[static_cast<std::size_t>(row.sigma)] == 2) {
            // Pair must be in canonical form.
            bool first = (i + 1 < rows.size() && rows[i + 1].sigma == row.sigma);
            cplx ea = first ? 1.0 : 0.0, eb = first ? 0.0 : 1.0;
            if (std::abs(row.a - ea) > 1e-12 || std::abs(row.b - eb) > 1e-12)
                fail("ConfigInvalid", "order block with two rows must be (1,0),(0,1)");
        }
    }
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sigma < rows[i - 1].sigma) fail("ConfigInvalid", "rows must be sorted by order");
}

void OperatorSpec::validate() const {
    expr.validate();
    bc.validate();
    if (expr.n != bc.n()) fail("ConfigInvalid", "expression order differs from number of boundary rows");
}

NormalizedBoundaryConditions normalize_bc(const std::vector<RawForm>& forms) {
    const int n = static_cast<int>(forms.size());
    if (n == 0) fail("RankDeficient", "no forms");
    // Row layout: columns 2j (at 0) and 2j+1 (at 1).
    std::vector<CVec> M(static_cast<std::size_t>(n), CVec(static_cast<std::size_t>(2 * n), cplx{0.0}));
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& f = forms[static_cast<std::size_t>(i)];
        if (static_cast<int>(f.at0.size()) > n || static_cast<int>(f.at1.size()) > n)
            fail("ConfigInvalid", "form has derivative order >= n");
        for (std::size_t j = 0; j < f.at0.size(); ++j) M[static_cast<std::size_t>(i)][2 * j] = f.at0[j];
        for (std::size_t j = 0; j < f.at1.size(); ++j) M[static_cast<std::size_t>(i)][2 * j + 1] = f.at1[j];
        for (const auto& c : M[static_cast<std::size_t>(i)]) scale = std::max(scale, std::abs(c));
    }
    if (scale == 0.0) fail("RankDeficient", "all forms vanish");
    const double tol = 1e-12 * scale;

    std::vector<int> order(static_cast<std::size_t>(n), -1);
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    auto axpy = [&](std::size_t dst, std::size_t src, cplx factor) {
        if (factor == cplx{0.0}) return;
        for (std::size_t c = 0; c < M[dst].size(); ++c) M[dst][c] -= factor * M[src][c];
    };
    auto pick = [&](std::size_t col) -> int {
        int best = -1;
        double bestv = tol;
        for (int i = 0; i < n; ++i) {
            if (assigned[static_cast<std::size_t>(i)]) continue;
            double v = std::abs(M[static_cast<std::size_t>(i)][col]);
            if (v > bestv) { bestv = v; best = i; }
        }
        return best;
    };

    for (int j = n - 1; j >= 0; --j) {
        const std::size_t ca = static_cast<std::size_t>(2 * j), cb = ca + 1;
        int pa = pick(ca);
        if (pa >= 0) {
            const auto ua = static_cast<std::size_t>(pa);
            assigned[ua] = true;
            order[ua] = j;
            for (int i = 0; i < n; ++i)
                if (!assigned[static_cast<std::size_t>(i)])
                    axpy(static_cast<std::size_t>(i), ua, M[static_cast<std::size_t>(i)][ca] / M[ua][ca]);
        }
        int pb = pick(cb);
        if (pb >= 0) {
            const auto ub = static_cast<std::size_t>(pb);
            assigned[ub] = true;
            order[ub] = j;
            for (int i = 0; i < n; ++i)
                if (!assigned[static_cast<std::size_t>(i)])
                    axpy(static_cast<std::size_t>(i), ub, M[static_cast<std::size_t>(i)][cb] / M[ub][cb]);
            if (pa >= 0) {
                const auto ua = static_cast<std::size_t>(pa);
                axpy(ua, ub, M[ua][cb] / M[ub][cb]);
            }
        }
        // Clear entries of unassigned rows at this order that fell under the tolerance.
        for (int i = 0; i < n; ++i) {
            if (assigned[static_cast<std::size_t>(i)]) continue;
            M[static_cast<std::size_t>(i)][ca] = 0.0;
            M[static_cast<std::size_t>(i)][cb] = 0.0;
        }
    }
    for (int i = 0; i < n; ++i)
        if (!assigned[static_cast<std::size_t>(i)]) fail("RankDeficient", "boundary forms are linearly dependent");

    NormalizedBoundaryConditions bc;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int j = order[ui];
        const std::size_t ca = static_cast<std::size_t>(2 * j), cb = ca + 1;
        cplx lead = std::abs(M[ui][ca]) > tol ? M[ui][ca] : M[ui][cb];
        BoundaryRow row;
        row.sigma = j;
        row.a = std::abs(M[ui][ca]) > tol ? M[ui][ca] / lead : cplx{0.0};
        row.b = std::abs(M[ui][cb]) > tol ? M[ui][cb] / lead : cplx{0.0};
        if (row.a == cplx{1.0} || std::abs(row.a - 1.0) < 1e-15) row.a = 1.0;
        for (int k = j - 1; k >= 0; --k) {
            cplx c0 = M[ui][static_cast<std::size_t>(2 * k)] / lead;
            cplx c1 = M[ui][static_cast<std::size_t>(2 * k + 1)] / lead;
            if (std::abs(c0) > 1e-14 || std::abs(c1) > 1e-14) row.lower.push_back({k, c0, c1});
        }
        bc.rows.push_back(row);
    }
    // Ascending order; inside a pair the (1,0) row first.
    std::stable_sort(bc.rows.begin(), bc.rows.end(), [](const BoundaryRow& u, const BoundaryRow& v) {
        if (u.sigma != v.sigma) return u.sigma < v.sigma;
        return std::abs(u.a) > std::abs(v.a);
    });
    // Rank-two blocks: elimination above leaves exactly (1,0) and (0,1).
    auto r = bc.multiplicities();
    for (auto& row : bc.rows) {
        if (r[static_cast<std::size_t>(row.sigma)] == 2) {
            if (std::abs(row.a) > 0.5) { row.a = 1.0; row.b = 0.0; }
            else { row.a = 0.0; row.b = 1.0; }
        }
    }
    return bc;
}

std::vector<RawForm> to_raw_forms(const NormalizedBoundaryConditions& bc) {
    const auto n = static_cast<std::size_t>(bc.n());
    std::vector<RawForm> out;
    for (const auto& row : bc.rows) {
        RawForm f{CVec(n, cplx{0.0}), CVec(n, cplx{0.0})};
        f.at0[static_cast<std::size_t>(row.sigma)] = row.a;
        f.at1[static_cast<std::size_t>(row.sigma)] = row.b;
        for (const auto& t : row.lower) {
            f.at0[static_cast<std::size_t>(t.order)] += t.at0;
            f.at1[static_cast<std::size_t>(t.order)] += t.at1;
        }
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------- sampled functions

SampledFunction::SampledFunction() : SampledFunction([](double) { return cplx{0.0}; }) {}

SampledFunction::SampledFunction(Evaluator f, std::size_t N, RVec breakpoints, Domain domain, Extension extension)
    : f_(std::move(f)), domain_(domain), extension_(extension) {
    if (N < 16) fail("ConfigInvalid", "SampledFunction grid needs N >= 16");
    samples_.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) samples_[i] = f_(static_cast<double>(i) / static_cast<double>(N));
    for (double b : breakpoints)
        if (b > 0.0 && b < 1.0) breakpoints_.push_back(b);
    breakpoints_ = merge_breakpoints(breakpoints_, {});
}

cplx SampledFunction::operator()(double x) const {
    if (x >= 0.0 && x <= 1.0) return f_(x);
    switch (extension_) {
    case Extension::Zero: return 0.0;
    case Extension::ConstantEndpoints: return x < 0.0 ? f_(0.0) : f_(1.0);
    case Extension::None: return f_(x);
    }
    return 0.0;
}

SampledFunction SampledFunction::with_extension(Extension e, Domain d) const {
    SampledFunction g(*this);
    g.extension_ = e;
    g.domain_ = d;
    return g;
}

SampledFunction linear_combination(cplx a, const SampledFunction& f, cplx b, const SampledFunction& g) {
    auto fe = f.evaluator();
    auto ge = g.evaluator();
    return SampledFunction([=](double x) { return a * fe(x) + b * ge(x); }, f.N(),
                           merge_breakpoints(f.breakpoints(), g.breakpoints()), f.domain(), f.extension());
}

SampledFunction scaled(cplx a, const SampledFunction& f) {
    auto fe = f.evaluator();
    return SampledFunction([=](double x) { return a * fe(x); }, f.N(), f.breakpoints(), f.domain(), f.extension());
}

SampledFunction reflect(const SampledFunction& f) {
    auto fe = f.evaluator();
    RVec bp;
    for (double b : f.breakpoints()) bp.push_back(1.0 - b);
    SampledFunction g([fe](double x) { return fe(1.0 - x); }, f.N(), bp, f.domain(), f.extension());
    // Samples mirror exactly, so the involution holds bit for bit on the grid.
    std::reverse_copy(f.samples_.begin(), f.samples_.end(), g.samples_.begin());
    return g;
}

SampledFunction extend_tilde(const SampledFunction& f) {
    return f.with_extension(Extension::ConstantEndpoints, Domain::RealLineExtended);
}

EndpointSplit split_endpoint(const SampledFunction& f) {
    const cplx f0 = f.raw(0.0), f1 = f.raw(1.0);
    SampledFunction P([=](double x) { return f0 * (1.0 - x) + f1 * x; }, f.N(), {}, f.domain(), f.extension());
    auto fe = f.evaluator();
    SampledFunction rest(
        [=](double x) {
            if (x == 0.0 || x == 1.0) return cplx{0.0};
            return fe(x) - (f0 * (1.0 - x) + f1 * x);
        },
        f.N(), f.breakpoints(), f.domain(), Extension::Zero);
    return {P, rest};
}

SubleadingElimination eliminate_subleading(const DifferentialExpression& expr) {
    const int n = expr.n;
    auto it = expr.coefficients.find(n - 1);
    if (it == expr.coefficients.end() || it->second.is_zero()) {
        return {expr, SampledFunction([](double) { return cplx{1.0}; })};
    }
    if (!it->second.smooth) fail("NotSmooth", "p_{n-1} is not flagged smooth");
    if (it->second.kind != CoefficientKind::Polynomial)
        fail("NotSmooth", "substitution implemented for polynomial p_{n-1} only");

    const CVec pn1 = it->second.poly;
    // W_s = V^{-1} D^s V, with W_1 = -p_{n-1}/n and W_{s+1} = D W_s + W_1 W_s.
    std::vector<CVec> W(static_cast<std::size_t>(n + 1));
    W[0] = {1.0};
    W[1] = poly_scale(-1.0 / n, pn1);
    for (int s = 1; s < n; ++s)
        W[static_cast<std::size_t>(s + 1)] = poly_add(poly_D(W[static_cast<std::size_t>(s)]),
                                                     poly_mul(W[1], W[static_cast<std::size_t>(s)]));

    bool all_poly = true;
    for (const auto& [k, c] : expr.coefficients)
        if (c.kind != CoefficientKind::Polynomial && !c.is_zero()) all_poly = false;

    DifferentialExpression out;
    out.n = n;
    if (all_poly) {
        auto pk = [&](int k) -> CVec {
            if (k == n) return {1.0};
            auto f = expr.coefficients.find(k);
            return f == expr.coefficients.end() ? CVec{} : f->second.poly;
        };
        for (int m = 0; m <= n - 2; ++m) {
            CVec q;
            for (int k = m; k <= n; ++k)
                q = poly_add(q, poly_scale(binomial(k, k - m), poly_mul(pk(k), W[static_cast<std::size_t>(k - m)])));
            out.coefficients[m] = CoefficientDescriptor::polynomial(q, true);
        }
    } else {
        const std::size_t N = 4000;
        for (int m = 0; m <= n - 2; ++m) {
            CVec s(N + 1);
            for (std::size_t i = 0; i <= N; ++i) {
                double x = static_cast<double>(i) / N;
                cplx acc = binomial(n, n - m) * poly_eval(W[static_cast<std::size_t>(n - m)], x);
                for (int k = m; k < n; ++k)
                    acc += binomial(k, k - m) * expr.p(k, x) * poly_eval(W[static_cast<std::size_t>(k - m)], x);
                s[i] = acc;
            }
            out.coefficients[m] = CoefficientDescriptor::dense(std::move(s));
        }
    }
    const CVec anti = poly_antiderivative(pn1);
    SampledFunction V([anti, n](double x) { return std::exp(-kI / static_cast<double>(n) * poly_eval(anti, x)); });
    return {out, V};
}

// -------------------------------------------------------------- quadrature

QuadRule gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    QuadRule r;
    r.nodes.resize(static_cast<std::size_t>(order));
    r.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[static_cast<std::size_t>(i)] = x;
        r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    cache[order] = r;
    return r;
}

QuadRule composite_rule(double a, double b, const RVec& edges, double max_width, int order) {
    RVec e{a};
    for (double t : edges)
        if (t > a && t < b) e.push_back(t);
    e.push_back(b);
    e = merge_breakpoints(e, {});
    const QuadRule gl = gauss_legendre(order);
    QuadRule out;
    for (std::size_t s = 0; s + 1 < e.size(); ++s) {
        const double len = e[s + 1] - e[s];
        if (len <= 0.0) continue;
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_width - 1e-12)));
        const double h = len / static_cast<double>(m);
        for (std::size_t p = 0; p < m; ++p) {
            const double lo = e[s] + h * static_cast<double>(p);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                out.nodes.push_back(lo + 0.5 * h * (gl.nodes[i] + 1.0));
                out.weights.push_back(0.5 * h * gl.weights[i]);
            }
        }
    }
    return out;
}

cplx quad(const Integrand& f, double a, double b, double rate, double tol, const RVec& breakpoints) {
    if (b <= a) return 0.0;
    double width = std::min((b - a) / 8.0, kPi / (4.0 * std::max(rate, 1.0)));
    auto apply = [&](double w) {
        QuadRule r = composite_rule(a, b, breakpoints, w, 12);
        cplx s{0.0};
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
        return s;
    };
    cplx prev = apply(width);
    for (int round = 0; round < 20; ++round) {
        width *= 0.5;
        cplx next = apply(width);
        if (std::abs(next - prev) <= std::max(tol, 1e-14 * std::abs(next))) return next;
        prev = next;
    }
    fail("ToleranceNotMet", "quad did not converge in 20 halving rounds");
}

// ------------------------------------------------------------ spectral point

SpectralPoint spectral_point(cplx lambda, int n) {
    double arg = std::arg(lambda);
    double mod = std::pow(std::abs(lambda), 1.0 / n);
    double arho;
    if (n % 2 == 0) {
        if (arg < 0.0) arg += 2.0 * kPi;
        arho = arg / n;
    } else if (std::abs(arg) <= kPi / 2.0) {
        arho = arg / n;
    } else if (arg > 0.0) {
        arho = kPi - (kPi - arg) / n;
    } else {
        arho = kPi + (kPi + arg) / n;
    }
    SpectralPoint sp{lambda, std::polar(mod, arho), Sector::S1};
    if (n % 2 == 0) sp.sector = arho < kPi / n ? Sector::S1 : Sector::S2;
    else sp.sector = std::abs(arho) <= kPi / (2.0 * n) + 1e-15 ? Sector::S1 : Sector::S2;
    return sp;
}

} // namespace equiconv::model
