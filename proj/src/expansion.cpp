#include "equiconv/expansion.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "equiconv/errors.hpp"
#include "equiconv/regularity.hpp"

namespace equiconv::expansion {

std::string to_string(Method m) {
    switch (m) {
    case Method::Contour: return "contour";
    case Method::Residue: return "residue";
    case Method::Dirichlet: return "dirichlet";
    case Method::FourierSeries: return "fourier-series";
    }
    return "?";
}

// ------------------------------------------------------------------ radii

RadiusSchedule choose_radii(const std::vector<solver::CharValueSet>& sets, int k_min, int k_max, double eps_min) {
    if (k_min < 1 || k_max < k_min) fail("InvalidInput", "radius index range must satisfy 1 <= k_min <= k_max");
    RVec moduli;
    for (const auto& s : sets)
        for (const auto& v : s.values) moduli.push_back(std::abs(v.rho));
    RadiusSchedule best;
    best.separation = -1.0;
    for (int i = 0; i < 64; ++i) {
        const double alpha = 2.0 * kPi * i / 64.0;
        double sep = std::numeric_limits<double>::infinity();
        for (int k = k_min; k <= k_max; ++k) {
            const double r = 2.0 * kPi * k + alpha;
            for (double m : moduli) sep = std::min(sep, std::abs(m - r));
        }
        if (sep > best.separation + 1e-12) {
            best.separation = sep;
            best.alpha = alpha;
        }
    }
    if (best.separation < eps_min)
        fail("NoSeparatingAlpha", "no offset alpha keeps the circles " + std::to_string(eps_min) +
                                      " away from the characteristic values");
    for (int k = k_min; k <= k_max; ++k) {
        best.k.push_back(k);
        best.radii.push_back(2.0 * kPi * k + best.alpha);
    }
    return best;
}

RadiusSchedule choose_radii(const std::vector<model::OperatorSpec>& ops, int k_min, int k_max, double eps_min,
                            const solver::SearchOptions& search) {
    std::vector<solver::CharValueSet> sets;
    const double R = 2.0 * kPi * (k_max + 1) + 1.0;
    for (const auto& op : ops) sets.push_back(solver::find_char_values(op, R, search));
    return choose_radii(sets, k_min, k_max, eps_min);
}

// ------------------------------------------------------- trigonometric sums

namespace {

double sinc(double t) {
    if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0;
    return std::sin(t) / t;
}

} // namespace

PartialSumResult sigma_r(const model::SampledFunction& f, double r, const RVec& x, Exec exec, double tol) {
    PartialSumResult out{x, CVec(x.size()), Method::Dirichlet, r, ""};
    const bool tails = f.extension() == model::Extension::ConstantEndpoints;
    const cplx f0 = tails ? f.raw(0.0) : cplx{0.0};
    const cplx f1 = tails ? f.raw(1.0) : cplx{0.0};
    const RVec& bp = f.breakpoints();
    for_each_index(x.size(), exec, [&](std::size_t i) {
        const double xi0 = x[i];
        auto integrand = [&](double s) { return (r / kPi) * sinc(r * (xi0 - s)) * f.raw(s); };
        cplx v = model::quad(integrand, 0.0, 1.0, r, tol, bp);
        if (tails) {
            v += f0 * (0.5 - gsl_sf_Si(r * xi0) / kPi);
            v += f1 * (0.5 - gsl_sf_Si(r * (1.0 - xi0)) / kPi);
        }
        out.values[i] = v;
    });
    return out;
}

PartialSumResult sigma_r_pi(const model::SampledFunction& f, double r, const RVec& x, double tol) {
    PartialSumResult out{x, CVec(x.size(), cplx{0.0}), Method::FourierSeries, r, ""};
    const int J = static_cast<int>(std::floor(r / (2.0 * kPi) + 1e-12));
    for (int j = -J; j <= J; ++j) {
        const double w = 2.0 * kPi * j;
        const cplx c = model::quad([&](double s) { return f.raw(s) * std::exp(-kI * w * s); }, 0.0, 1.0,
                                   std::abs(w), tol, f.breakpoints());
        for (std::size_t i = 0; i < x.size(); ++i) out.values[i] += c * std::exp(kI * w * x[i]);
    }
    return out;
}

// ------------------------------------------------------------ contour form

namespace {

struct ArcNode {
    cplx rho;
    double weight;  // d phi weight
};

std::vector<ArcNode> arc_nodes(int n, double r, const ContourOptions& opt) {
    std::vector<std::pair<double, double>> arcs;
    if (n % 2 == 0) {
        arcs.push_back({0.0, 2.0 * kPi / n});
    } else {
        const double h = kPi / (2.0 * n);
        arcs.push_back({-h, h});
        arcs.push_back({kPi - h, kPi + h});
    }
    const int total = std::max(opt.min_nodes, static_cast<int>(std::ceil(opt.nodes_per_radius * r)));
    const int order = 16;
    const auto gl = model::gauss_legendre(order);
    const int panels = std::max(1, static_cast<int>(std::ceil(static_cast<double>(total) /
                                                             (order * static_cast<double>(arcs.size())))));
    std::vector<ArcNode> nodes;
    for (const auto& [a, b] : arcs) {
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p)
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double phi = a + h * (p + 0.5 * (gl.nodes[q] + 1.0));
                nodes.push_back({std::polar(r, phi), 0.5 * h * gl.weights[q]});
            }
    }
    return nodes;
}

CVec ordered_sum(const std::vector<CVec>& parts, std::size_t m) {
    CVec s(m, cplx{0.0});
    for (const auto& p : parts)
        for (std::size_t i = 0; i < m; ++i) s[i] += p[i];
    return s;
}

} // namespace

PartialSumResult S_r_contour(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                             const RVec& x, const ContourOptions& opt) {
    PartialSumResult out{x, CVec(x.size(), cplx{0.0}), Method::Contour, r, op.label};
    const int n = op.n();
    auto R = solver::make_resolvent(op, f, x, {r, opt.numeric});
    const auto nodes = arc_nodes(n, r, opt);
    std::vector<CVec> parts(nodes.size());
    for_each_index(nodes.size(), opt.exec, [&](std::size_t i) {
        const cplx rho = nodes[i].rho;
        CVec v = opt.free_term ? R->free_term(rho) : R->scaled_apply(rho);
        cplx factor = -rho * nodes[i].weight / (2.0 * kPi);
        if (opt.measure == ContourMeasure::Rho) factor /= static_cast<double>(n) * std::pow(rho, n - 1);
        for (auto& e : v) e *= factor;
        parts[i] = std::move(v);
    });
    out.values = ordered_sum(parts, x.size());
    return out;
}

// ------------------------------------------------------------ residue form

PartialSumResult S_r_residues(const model::OperatorSpec& op, const model::SampledFunction& f, double r,
                              const RVec& x, const solver::CharValueSet& cv, const ResidueOptions& opt) {
    PartialSumResult out{x, CVec(x.size(), cplx{0.0}), Method::Residue, r, op.label};
    if (cv.R < r) fail("InvalidInput", "characteristic values are known only up to a smaller radius");
    const int n = op.n();
    const auto eps = regularity::unit_roots(n);
    const auto& vals = cv.values;

    // Distance between eigenvalues j and k measured where the circle lives.
    auto rho_dist = [&](std::size_t j, std::size_t k) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& e : eps) d = std::min(d, std::abs(vals[j].rho_search - vals[k].rho_search * e));
        return d;
    };
    auto in_rho_plane = [&](std::size_t j) { return std::abs(vals[j].rho) >= 1.0; };
    auto dist = [&](std::size_t j, std::size_t k) {
        return in_rho_plane(j) ? rho_dist(j, k) : std::abs(vals[j].lambda - vals[k].lambda);
    };

    // Group eigenvalues too close for separate circles.
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < vals.size(); ++j)
        if (std::abs(vals[j].rho) < r) members.push_back(j);
    std::vector<std::size_t> group(vals.size());
    std::iota(group.begin(), group.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t a) {
        return group[a] == a ? a : group[a] = root(group[a]);
    };
    for (std::size_t a = 0; a < vals.size(); ++a)
        for (std::size_t b = a + 1; b < vals.size(); ++b) {
            const double scale = in_rho_plane(a) ? std::max(1.0, std::abs(vals[a].rho)) : 1.0;
            if (dist(a, b) < 1e-3 * scale) group[root(b)] = root(a);
        }

    struct Circle {
        bool rho_plane;
        cplx centre;
        double radius;
    };
    std::vector<Circle> circles;
    std::vector<bool> done(vals.size(), false);
    for (std::size_t j : members) {
        const std::size_t g = root(j);
        if (done[g]) continue;
        done[g] = true;
        std::vector<std::size_t> grp;
        for (std::size_t k = 0; k < vals.size(); ++k)
            if (root(k) == g) grp.push_back(k);
        for (std::size_t k : grp)
            if (std::abs(vals[k].rho) >= r)
                fail("ClusterTooTight", "a cluster of characteristic values straddles the contour");
        const bool rp = in_rho_plane(grp.front());
        cplx centre{0.0};
        for (std::size_t k : grp) centre += rp ? vals[k].rho_search : vals[k].lambda;
        centre /= static_cast<double>(grp.size());
        double diameter = 0.0, gap = std::numeric_limits<double>::infinity();
        for (std::size_t a : grp) {
            for (std::size_t b : grp) diameter = std::max(diameter, dist(a, b));
            for (std::size_t b = 0; b < vals.size(); ++b)
                if (root(b) != g) gap = std::min(gap, dist(a, b));
        }
        double radius = opt.gap_fraction * gap;
        if (rp) radius = std::min(radius, 0.25 * std::abs(centre) * std::sin(kPi / n));
        if (!std::isfinite(radius)) radius = rp ? 0.25 * std::abs(centre) * std::sin(kPi / n) : 1.0;
        if (grp.size() > 1 && radius < 4.0 * diameter)
            fail("ClusterTooTight", "characteristic values too close for a joint circle");
        circles.push_back({rp, centre, radius});
    }
    if (circles.empty()) return out;

    double rho_max = r;
    for (const auto& c : circles)
        if (c.rho_plane) rho_max = std::max(rho_max, std::abs(c.centre) + c.radius);
    auto R = solver::make_resolvent(op, f, x, {rho_max, opt.numeric});
    const auto N = static_cast<std::size_t>(opt.nodes);
    std::vector<CVec> parts(circles.size() * N);
    for_each_index(parts.size(), opt.exec, [&](std::size_t idx) {
        const Circle& c = circles[idx / N];
        const double theta = 2.0 * kPi * (static_cast<double>(idx % N) + 0.5) / static_cast<double>(N);
        const cplx dz = std::polar(c.radius, theta);
        CVec v = c.rho_plane ? R->scaled_apply(c.centre + dz) : R->apply_lambda(c.centre + dz);
        const cplx factor = -dz / static_cast<double>(N);
        for (auto& e : v) e *= factor;
        parts[idx] = std::move(v);
    });
    out.values = ordered_sum(parts, x.size());
    return out;
}

// ---------------------------------------------------------- Os'kina kernel

CVec oskina_roots(int n) {
    if (n < 4 || n % 2 != 0) fail("InvalidInput", "the remainder kernel needs even n >= 4");
    CVec roots;
    if (n % 4 == 0) {
        const int k = n / 4;
        for (int j = k + 1; j <= 3 * k - 1; ++j) roots.push_back(regularity::unit_root(n, j));
    } else {
        const int k = (n - 2) / 4;
        for (int j = k + 1; j <= 3 * k; ++j) roots.push_back(regularity::unit_root(n, j + 0.5));
    }
    return roots;
}

cplx oskina_kernel(int n, double r, double x, double xi, double t) {
    const CVec roots = oskina_roots(n);
    const double a = std::abs(x - xi), b = std::abs(xi - t);
    if (a == 0.0 && b == 0.0) fail("DegenerateGeometry", "both distances vanish");
    // First term: int_r^inf sin(eta d)/eta = pi/2 - Si(r d).
    cplx value = kPi / 2.0 - gsl_sf_Si(r * (a + b));

    // cos(eta c) * sum_j w_j exp(eta eps_j d) / eta over [r, inf), for the two
    // exponential sums. A vanishing decay distance leaves a -Ci tail.
    auto term = [&](double c, double d, bool conj_weights) -> cplx {
        cplx wsum{0.0};
        for (const auto& e : roots) wsum += conj_weights ? std::conj(e) : e;
        if (d == 0.0) return -wsum * gsl_sf_Ci(r * c);
        double decay = std::numeric_limits<double>::infinity();
        for (const auto& e : roots) decay = std::min(decay, -e.real() * d);
        double H = r + 200.0 * kPi;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const double bound = static_cast<double>(roots.size()) * std::exp(-decay * H) / (H * decay);
            if (bound <= 1e-6) {
                auto f = [&](double eta) {
                    cplx s{0.0};
                    for (const auto& e : roots) s += (conj_weights ? std::conj(e) : e) * std::exp(eta * e * d);
                    return std::cos(eta * c) * s / eta;
                };
                return model::quad(f, r, H, std::max(c, d), 1e-10);
            }
            H *= 2.0;
        }
        fail("ToleranceNotMet", "exponential tail of the remainder kernel is not negligible");
    };
    value += term(a, b, true);
    value -= term(b, a, false);
    return value;
}

} // namespace equiconv::expansion
