#include "equiconv/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "equiconv/errors.hpp"
#include "equiconv/regularity.hpp"

namespace equiconv::criterion {

using model::SampledFunction;

// ---------------------------------------------------------------- alpha

AlphaTable alpha_numbers(const model::OperatorSpec& op) {
    const int n = op.n();
    if (n % 2 != 0) fail("InvalidInput", "alpha numbers are defined for even order; use odd_reduction");
    const auto un = static_cast<std::size_t>(n);
    AlphaTable t;
    t.n = n;
    t.q = n / 2;
    const auto M = regularity::theta_matrix(op.bc, false);
    t.Theta = linalg::det(M);
    if (!regularity::is_nonzero(t.Theta, regularity::theta_scale(op.bc, false)))
        fail("NotRegular", "Theta vanishes; alpha numbers need a regular operator");
    t.cofactors = linalg::cofactors(M);
    t.d.assign(un, CVec(un));
    t.alpha.assign(un, CVec(un, cplx{0.0}));
    const auto eps = regularity::unit_roots(n);
    for (std::size_t m = 0; m < un; ++m)
        for (std::size_t nu = 0; nu < un; ++nu)
            t.d[m][nu] = static_cast<int>(m) < t.q ? op.bc.rows[nu].b : -op.bc.rows[nu].a;
    for (std::size_t m = 0; m < un; ++m)
        for (std::size_t k = 0; k < un; ++k) {
            cplx s{0.0};
            for (std::size_t nu = 0; nu < un; ++nu)
                s += std::pow(eps[m], -(n - 1 - op.bc.rows[nu].sigma)) * t.d[m][nu] * t.cofactors[nu][k];
            t.alpha[m][k] = s / (t.Theta * 2.0 * kPi);
        }
    const double scale = regularity::theta_scale(op.bc, false);
    for (std::size_t k = 0; k < un; ++k) {
        cplx s{0.0};
        for (std::size_t nu = 0; nu < un; ++nu) s += M[nu][k] * t.cofactors[nu][k];
        t.laplace_residual = std::max(t.laplace_residual, std::abs(s - t.Theta) / scale);
    }
    return t;
}

PhiPsi phi_psi(const SampledFunction& f0, const Table& alpha, int n) {
    const double tol = 1e-10 * (1.0 + sup_abs(f0.samples()));
    if (std::abs(f0.raw(0.0)) > tol || std::abs(f0.raw(1.0)) > tol)
        fail("EndpointNotZero", "Phi and Psi need f0(0) = f0(1) = 0");
    const int q = n / 2;
    const auto uq = static_cast<std::size_t>(q), un = static_cast<std::size_t>(n);
    const SampledFunction fs = model::reflect(f0);
    PhiPsi out;
    for (std::size_t k = 0; k < un; ++k) {
        out.Phi.push_back(model::linear_combination(alpha[uq][k], f0, alpha[0][k], fs)
                              .with_extension(model::Extension::Zero, model::Domain::UnitInterval));
        out.Psi.push_back(model::linear_combination(alpha[un - 1][k], f0, alpha[uq - 1][k], fs)
                              .with_extension(model::Extension::Zero, model::Domain::UnitInterval));
    }
    return out;
}

Table beta_numbers(const model::OperatorSpec& op1, const model::OperatorSpec& op2) {
    if (op1.n() != op2.n()) fail("OrderMismatch", "beta numbers need operators of the same order");
    auto a = alpha_numbers(op1).alpha;
    const auto b = alpha_numbers(op2).alpha;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) a[i][j] -= b[i][j];
    return a;
}

namespace {

cplx inner(const CVec& a, const CVec& b) {
    cplx s{0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(b[i]) * a[i];
    return s;
}

// Span of {c00 f + c01 f#, c10 f + c11 f#} equals span(f, f#) of dimension rank,
// with f# = c f when rank = 1.
bool spans(cplx c00, cplx c01, cplx c10, cplx c11, int rank, cplx c, double table_scale) {
    const double thr = 1e-10 * std::max(table_scale, 1e-300);
    if (rank == 0) return true;
    if (rank == 1) return std::max(std::abs(c00 + c * c01), std::abs(c10 + c * c11)) > thr;
    const double rows = std::hypot(std::abs(c00), std::abs(c01)) * std::hypot(std::abs(c10), std::abs(c11));
    return std::abs(c00 * c11 - c01 * c10) > 1e-10 * std::max(rows, 1e-300) && rows > thr * thr;
}

} // namespace

Nondegeneracy nondegeneracy(const Table& b, int n, const SampledFunction& f0) {
    const auto q = static_cast<std::size_t>(n / 2), un = static_cast<std::size_t>(n);
    Nondegeneracy nd;
    nd.det1 = b[0][0] * b[q][q] - b[q][0] * b[0][q];
    nd.det2 = b[q - 1][q - 1] * b[un - 1][un - 1] - b[un - 1][q] * b[q - 1][un - 1];

    // Dimension of span(f0, f0#) from the sampled Gram matrix.
    const CVec& f = f0.samples();
    CVec fs(f.rbegin(), f.rend());
    const double ff = std::real(inner(f, f));
    cplx c{0.0};
    if (ff <= 1e-300) {
        nd.base_rank = 0;
    } else {
        c = inner(fs, f) / ff;
        CVec res(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) res[i] = fs[i] - c * f[i];
        nd.base_rank = std::sqrt(std::real(inner(res, res)) / ff) > 1e-7 ? 2 : 1;
    }
    double scale = 0.0;
    for (const auto& row : b)
        for (const auto& v : row) scale = std::max(scale, std::abs(v));
    // Phi_k = alpha_{qk} f + alpha_{0k} f#; Psi_k = alpha_{n-1,k} f + alpha_{q-1,k} f#.
    nd.span_phi = spans(b[q][0], b[0][0], b[q][q], b[0][q], nd.base_rank, c, scale);
    nd.span_psi = spans(b[un - 1][q - 1], b[q - 1][q - 1], b[un - 1][un - 1], b[q - 1][un - 1], nd.base_rank, c,
                        scale);
    if (scale == 0.0 && nd.base_rank > 0) nd.span_phi = nd.span_psi = false;
    nd.span_ok = nd.span_phi && nd.span_psi;
    return nd;
}

// ------------------------------------------------------------------ I_r

CVec I_r(const SampledFunction& f0, double r, int sign, const RVec& x, Exec exec, double tol) {
    if (r < 2.0) fail("InvalidInput", "I_r needs r >= 2");
    const double a = 1.0 / r;
    RVec edges;
    for (double e = a * 1.5; e < 1.0; e *= 1.5) edges.push_back(e);
    for (double bp : f0.breakpoints()) edges.push_back(bp);
    const cplx w = static_cast<double>(sign >= 0 ? 1 : -1) * kI * r;
    auto evaluate = [&](double width) {
        const auto rule = model::composite_rule(a, 1.0, edges, width, 12);
        CVec g(rule.nodes.size());
        for (std::size_t j = 0; j < g.size(); ++j)
            g[j] = rule.weights[j] * std::exp(w * rule.nodes[j]) * f0.raw(rule.nodes[j]);
        CVec out(x.size());
        for_each_index(x.size(), exec, [&](std::size_t i) {
            cplx s{0.0};
            for (std::size_t j = 0; j < g.size(); ++j) s += g[j] / (x[i] + rule.nodes[j]);
            out[i] = s;
        });
        return out;
    };
    double width = std::min(0.125, kPi / (4.0 * r));
    CVec prev = evaluate(width);
    for (int round = 0; round < 10; ++round) {
        width *= 0.5;
        CVec next = evaluate(width);
        if (sup_abs_diff(next, prev) <= tol * std::max(1.0, sup_abs(next))) return next;
        prev = std::move(next);
    }
    fail("ToleranceNotMet", "I_r quadrature did not converge");
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::ConsistentWithEquiconvergence: return "ConsistentWithEquiconvergence";
    case Verdict::ConsistentWithDivergence: return "ConsistentWithDivergence";
    case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

// --------------------------------------------------------------- reports

void check_admissible(const model::OperatorSpec& op, const SampledFunction& f) {
    for (const auto& row : op.bc.rows) {
        if (row.sigma != 0) continue;
        const cplx v = row.a * f.raw(0.0) + row.b * f.raw(1.0);
        if (std::abs(v) > 1e-8)
            fail("AdmissibilityFailed", "f violates an order-zero boundary condition of " + op.label);
    }
}

namespace {

struct SumEngine {
    const model::OperatorSpec& op;
    SumMethod method;
    Exec exec;
    std::optional<solver::CharValueSet> cv;

    expansion::PartialSumResult operator()(const SampledFunction& f, double r, const RVec& x) {
        SumMethod m = method;
        if (m == SumMethod::Auto) m = op.expr.is_model() ? SumMethod::Contour : SumMethod::Residue;
        if (m == SumMethod::Contour) {
            expansion::ContourOptions o;
            o.exec = exec;
            return expansion::S_r_contour(op, f, r, x, o);
        }
        if (!cv || cv->R < r) cv = solver::find_char_values(op, r + 2.0);
        expansion::ResidueOptions o;
        o.exec = exec;
        return expansion::S_r_residues(op, f, r, x, *cv, o);
    }
};

double sup_on(const CVec& a, const CVec& b) { return sup_abs_diff(a, b); }

} // namespace

expansion::PartialSumResult partial_sum(const model::OperatorSpec& op, const SampledFunction& f, double r,
                                        const RVec& x, SumMethod method, Exec exec) {
    SumEngine e{op, method, exec, std::nullopt};
    return e(f, r, x);
}

EquiconvergenceReport whole_interval_report(const std::vector<model::OperatorSpec>& ops, const SampledFunction& f,
                                            const expansion::RadiusSchedule& schedule, const ReportOptions& opt) {
    if (ops.empty() || ops.size() > 2) fail("InvalidInput", "the report takes one or two operators");
    if (ops.size() == 2 && ops[0].n() != ops[1].n()) fail("OrderMismatch", "operators differ in order");
    for (const auto& op : ops) check_admissible(op, f);
    EquiconvergenceReport rep;
    rep.mode = ops.size() == 1 ? "single-op" : "pair-op";
    for (const auto& op : ops) rep.labels.push_back(op.label);
    rep.radii = schedule.radii;
    rep.k = schedule.k;

    const auto split = model::split_endpoint(f);
    const SampledFunction f0 = split.f0;
    const SampledFunction f0s = model::reflect(f0);

    auto table_of = [&](const model::OperatorSpec& op) {
        if (op.n() % 2 == 0) return alpha_numbers(op).alpha;
        rep.alpha_from_square = true;
        return alpha_numbers(regularity::square_operator(op)).alpha;
    };
    rep.alpha = table_of(ops[0]);
    if (ops.size() == 2) {
        const auto other = table_of(ops[1]);
        for (std::size_t i = 0; i < rep.alpha.size(); ++i)
            for (std::size_t j = 0; j < rep.alpha.size(); ++j) rep.alpha[i][j] -= other[i][j];
    }
    const int n_eff = static_cast<int>(rep.alpha.size());
    rep.functions = phi_psi(f0, rep.alpha, n_eff);
    rep.nondeg = nondegeneracy(rep.alpha, n_eff, f0);

    const RVec& x = opt.grid;
    const std::size_t q = static_cast<std::size_t>(n_eff / 2), nn = static_cast<std::size_t>(n_eff);
    struct Tracked {
        Curve curve;
        std::string family;  // "f0", "phi-psi" or "direct"
        const SampledFunction* g;
        int sign;
    };
    std::vector<Tracked> tracked = {
        {{"I+(f0)", {}}, "f0", &f0, +1},
        {{"I-(f0)", {}}, "f0", &f0, -1},
        {{"I+(f0#)", {}}, "f0", &f0s, +1},
        {{"I-(f0#)", {}}, "f0", &f0s, -1},
        {{"I+(Phi_0)", {}}, "phi-psi", &rep.functions.Phi[0], +1},
        {{"I+(Phi_q)", {}}, "phi-psi", &rep.functions.Phi[q], +1},
        {{"I-(Psi_{q-1})", {}}, "phi-psi", &rep.functions.Psi[q - 1], -1},
        {{"I-(Psi_{n-1})", {}}, "phi-psi", &rep.functions.Psi[nn - 1], -1},
    };
    Curve diff{ops.size() == 1 ? "S-sigma(f~)" : "S1-S2", {}};
    std::vector<SumEngine> engines;
    for (const auto& op : ops) engines.push_back({op, opt.method, opt.exec, std::nullopt});
    const SampledFunction ft = model::extend_tilde(f);
    for (double r : schedule.radii) {
        for (auto& t : tracked) t.curve.values.push_back(sup_abs(I_r(*t.g, r, t.sign, x, opt.exec, opt.quad_tol)));
        const auto S1 = engines[0](f, r, x);
        if (ops.size() == 1) {
            const auto sig = expansion::sigma_r(ft, r, x, opt.exec);
            diff.values.push_back(sup_on(S1.values, sig.values));
        } else {
            const auto S2 = engines[1](f, r, x);
            diff.values.push_back(sup_on(S1.values, S2.values));
        }
    }
    auto mark = [&](Curve& c) {
        c.decreased = c.values.empty() ||
                      c.values.back() <= std::max(opt.decay_factor * c.values.front(), 5.0 * opt.quad_tol);
    };
    // Under nondegeneracy the criterion is stated for f0 and f0#; without it
    // only the Phi/Psi form holds, so the verdict uses that family instead.
    rep.verdict_family = rep.nondeg.span_ok ? "f0" : "phi-psi";
    bool all = true, none = true;
    mark(diff);
    for (auto& t : tracked) {
        mark(t.curve);
        if (t.family != rep.verdict_family) continue;
        all = all && t.curve.decreased;
        none = none && !t.curve.decreased;
    }
    all = all && diff.decreased;
    none = none && !diff.decreased;
    rep.curves.clear();
    for (auto& t : tracked) rep.curves.push_back(t.curve);
    rep.curves.push_back(diff);
    if (all) rep.verdict = Verdict::ConsistentWithEquiconvergence;
    else if (none) rep.verdict = Verdict::ConsistentWithDivergence;
    else rep.verdict = Verdict::Indeterminate;
    return rep;
}

double second_order_identity_residual(const model::OperatorSpec& op, const SampledFunction& f, double r,
                                      const IdentityOptions& opt) {
    if (op.n() != 2) fail("InvalidInput", "the order-two identity needs n = 2");
    check_admissible(op, f);
    const auto split = model::split_endpoint(f);
    const auto table = alpha_numbers(op);
    const auto pp = phi_psi(split.f0, table.alpha, 2);
    const RVec& x = opt.grid;
    RVec minus_x(x.size()), x_minus_1(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        minus_x[i] = -x[i];
        x_minus_1[i] = x[i] - 1.0;
    }
    const auto S = partial_sum(op, f, r, x, opt.method, opt.exec);
    const auto sig = expansion::sigma_r(model::extend_tilde(f), r, x, opt.exec);
    const auto A = expansion::sigma_r(pp.Phi[0], r, minus_x, opt.exec);
    const auto B = expansion::sigma_r(pp.Phi[1], r, x_minus_1, opt.exec);
    const double s = opt.printed_sign ? 1.0 : -1.0;
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        res = std::max(res, std::abs(S.values[i] - sig.values[i] - s * 2.0 * kPi * (A.values[i] + B.values[i])));
    return res;
}

// ---------------------------------------------------------- odd orders

std::string OddConvention::describe() const {
    return "delta=" + delta + ", ratio=" + (ratio_printed ? "theta(b1,b0)/theta(b0,b1)" : "theta(b0,b1)/theta(b1,b0)") +
           ", roots=" + (roots_printed ? "2m-th roots eps_q, eps_{m-1/2}" : "m-th root eps_q");
}

OddReduction odd_reduction(const model::OperatorSpec& op) {
    const int m = op.n();
    if (m % 2 == 0) fail("InvalidInput", "odd_reduction needs an odd order");
    const auto rep = regularity::classify(op);
    if (rep.verdict != regularity::Verdict::Regular) fail("NotRegular", "odd_reduction needs a regular operator");
    const int n = 2 * m, q = (m - 1) / 2;
    const auto un = static_cast<std::size_t>(n), um = static_cast<std::size_t>(m);
    OddReduction out;
    out.m = m;
    out.square_table = alpha_numbers(regularity::square_operator(op));
    const auto& A = out.square_table.alpha;
    for (std::size_t t = 0; t < un; ++t)
        for (std::size_t k = 0; k < un; ++k)
            if ((t + k) % 2 == 1) out.parity_max = std::max(out.parity_max, std::abs(A[t][k]));
    out.direct = {A[0][0], A[um - 1][um - 1], A[um][um], A[un - 1][un - 1]};

    const cplx th01 = rep.theta_01, th10 = *rep.theta_10;
    const double chi = rep.chi;
    struct Candidate {
        std::string name;
        cplx delta;
    };
    const std::vector<Candidate> deltas{{"exp(chi/m)", std::exp(chi / m)},
                                        {"exp(2 pi i chi/m)", std::exp(2.0 * kPi * kI * chi / static_cast<double>(m))},
                                        {"exp(-2 pi i chi/m)", std::exp(-2.0 * kPi * kI * chi / static_cast<double>(m))}};
    auto evaluate = [&](const Candidate& d, bool ratio_printed, bool roots_printed, cplx& Omega) {
        Omega = (ratio_printed ? th10 / th01 : th01 / th10) * std::pow(d.delta, -(q + 1));
        const cplx eq = roots_printed ? regularity::unit_root(n, q) : regularity::unit_root(m, q);
        const cplx eh = roots_printed ? regularity::unit_root(n, m - 0.5) : regularity::unit_root(m, q);
        const double c = 1.0 / (2.0 * kPi);
        return CVec{c * d.delta * Omega, c * eq * Omega, c / Omega, c * eh / (d.delta * Omega)};
    };
    auto discrepancy = [&](const CVec& closed) {
        double e = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) e = std::max(e, std::abs(closed[i] - out.direct[i]));
        return e;
    };
    cplx Omega;
    out.printed_discrepancy = discrepancy(evaluate(deltas[0], true, true, Omega));
    out.discrepancy = std::numeric_limits<double>::infinity();
    for (const auto& d : deltas)
        for (bool ratio : {true, false})
            for (bool roots : {true, false}) {
                CVec closed = evaluate(d, ratio, roots, Omega);
                const double e = discrepancy(closed);
                if (e < out.discrepancy - 1e-15) {
                    out.discrepancy = e;
                    out.closed = closed;
                    out.delta = d.delta;
                    out.Omega = Omega;
                    out.convention = {d.name, ratio, roots};
                }
            }
    return out;
}

} // namespace equiconv::criterion
