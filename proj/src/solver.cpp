#include "equiconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <optional>

#include "equiconv/errors.hpp"
#include "equiconv/regularity.hpp"

namespace equiconv::solver {

using model::BoundaryRow;
using model::NormalizedBoundaryConditions;
using model::OperatorSpec;

namespace {

// rho^{j - sigma} eps^j, the scaled derivative factor of exp(i rho eps x).
cplx scaled_power(cplx rho, cplx eps, int j, int sigma) {
    cplx e = std::pow(eps, j);
    return j == sigma ? e : std::pow(rho, j - sigma) * e;
}

double hadamard(const linalg::CMat& m) {
    double s = 1.0;
    for (const auto& row : m) {
        double r = 0.0;
        for (const auto& c : row) r += std::norm(c);
        s *= std::sqrt(r);
    }
    return s;
}

RVec sorted_unique(RVec v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Integrates columns of the first-order system for l(y) = lambda y + forcing
// across [x0, x1], segment by segment between breakpoints. State layout is
// column-major: state[c*n + j] = D^j y_c. The optional forcing applies to the
// last column. Coefficients and forcing are evaluated inside the current
// segment so that one-sided values are used at discontinuities.
CVec propagate(const model::DifferentialExpression& expr, cplx lambda, CVec state, std::size_t ncols,
               const model::SampledFunction* forcing, double x0, double x1, RVec breaks, const RVec& stops,
               const ode::Observer& observer, const ode::Options& opt) {
    const int n = expr.n;
    const auto un = static_cast<std::size_t>(n);
    std::vector<std::pair<int, const model::CoefficientDescriptor*>> coeffs;
    for (const auto& [k, c] : expr.coefficients)
        if (!c.is_zero()) coeffs.emplace_back(k, &c);

    RVec edges{x0};
    for (double b : breaks)
        if (b > x0 && b < x1) edges.push_back(b);
    edges.push_back(x1);
    edges = sorted_unique(edges);

    std::size_t stop_offset = 0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        const double hi_in = std::nextafter(hi, lo);
        auto rhs = [&](double x, const CVec& y, CVec& dy) {
            const double xe = std::clamp(x, lo, hi_in);
            cplx pk[16];
            for (std::size_t i = 0; i < coeffs.size(); ++i) pk[i] = (*coeffs[i].second)(xe);
            const cplx fx = forcing ? (*forcing)(xe) : cplx{0.0};
            for (std::size_t c = 0; c < ncols; ++c) {
                const std::size_t o = c * un;
                for (std::size_t j = 0; j + 1 < un; ++j) dy[o + j] = kI * y[o + j + 1];
                cplx top = lambda * y[o];
                for (std::size_t i = 0; i < coeffs.size(); ++i)
                    top -= pk[i] * y[o + static_cast<std::size_t>(coeffs[i].first)];
                if (forcing && c + 1 == ncols) top += fx;
                dy[o + un - 1] = kI * top;
            }
        };
        // Stops inside this segment, including its right end but excluding the
        // left end unless this is the first segment.
        RVec local;
        std::vector<std::size_t> idx;
        while (stop_offset < stops.size() && stops[stop_offset] <= hi) {
            if (stops[stop_offset] >= lo) {
                local.push_back(stops[stop_offset]);
                idx.push_back(stop_offset);
            }
            ++stop_offset;
        }
        state = ode::integrate(rhs, lo, hi, std::move(state), local,
                               [&](std::size_t i, const CVec& y) { observer(idx[i], y); }, opt);
    }
    return state;
}

ode::Options ode_options(const NumericOptions& opt) {
    ode::Options o;
    o.rtol = opt.tol;
    o.atol = opt.tol * 1e-2;
    return o;
}

void check_cap(int n, cplx lambda, const NumericOptions& opt) {
    if (std::pow(std::abs(lambda), 1.0 / n) > opt.rho_cap)
        fail("CapExceeded", "|lambda|^(1/n) exceeds the configured radius cap");
}

// Matrix U_nu(y_k) of an initial-value fundamental system.
linalg::CMat boundary_matrix(const NormalizedBoundaryConditions& bc, const Fss& fss) {
    const auto n = static_cast<std::size_t>(fss.n);
    linalg::CMat M(n, CVec(n));
    CVec d0(n), d1(n);
    for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                d0[j] = fss.at0[j][k];
                d1[j] = fss.at1[j][k];
            }
            M[nu][k] = apply_form(bc.rows[nu], d0, d1);
        }
    return M;
}

} // namespace

std::vector<bool> auto_partition(int n, cplx rho) {
    auto eps = regularity::unit_roots(n);
    std::vector<bool> P(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cplx w = rho * eps[static_cast<std::size_t>(k)];
        const double tol = 1e-13 * std::abs(w);
        P[static_cast<std::size_t>(k)] = w.imag() > tol || (std::abs(w.imag()) <= tol && w.real() > 0.0);
    }
    return P;
}

cplx Fss::y(int k, double x) const { return std::exp(kI * rho * eps[static_cast<std::size_t>(k)] * x); }

cplx Fss::z(int k, double x) const {
    return in_P[static_cast<std::size_t>(k)] ? y(k, x) : y(k, x - 1.0);
}

cplx Fss::u(int m, double xi) const {
    return in_P[static_cast<std::size_t>(m)] ? y(m, 1.0 - xi) : y(m, -xi);
}

Fss model_fss(int n, cplx rho) { return model_fss(n, rho, auto_partition(n, rho)); }

Fss model_fss(int n, cplx rho, std::vector<bool> partition) {
    Fss f;
    f.kind = FssKind::ModelExponential;
    f.n = n;
    f.rho = rho;
    f.lambda = std::pow(rho, n);
    f.eps = regularity::unit_roots(n);
    f.in_P = std::move(partition);
    const auto un = static_cast<std::size_t>(n);
    f.at0.assign(un, CVec(un));
    f.at1.assign(un, CVec(un));
    for (std::size_t k = 0; k < un; ++k) {
        const cplx w = rho * f.eps[k];
        const cplx e1 = std::exp(kI * w);
        for (std::size_t j = 0; j < un; ++j) {
            const cplx p = std::pow(w, static_cast<int>(j));
            f.at0[j][k] = p;
            f.at1[j][k] = p * e1;
        }
    }
    return f;
}

Fss power_series_fss(int n, cplx lambda) {
    Fss f;
    f.kind = FssKind::InitialValue;
    f.n = n;
    f.lambda = lambda;
    f.rho = model::spectral_point(lambda, n).rho;
    const auto un = static_cast<std::size_t>(n);
    f.at0.assign(un, CVec(un, cplx{0.0}));
    f.at1.assign(un, CVec(un, cplx{0.0}));
    for (std::size_t j = 0; j < un; ++j) f.at0[j][j] = 1.0;
    const CVec ipow{1.0, kI, -1.0, -kI};
    const double loglam = lambda == cplx{0.0} ? 0.0 : std::log(std::abs(lambda));
    const double arglam = std::arg(lambda);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cplx sum{0.0};
            for (int m = 0; m < 2000; ++m) {
                const int p = k + m * n - j;
                if (p < 0) continue;
                if (m > 0 && lambda == cplx{0.0}) break;
                const double logmag = m * loglam - std::lgamma(p + 1.0);
                const cplx term = std::polar(std::exp(logmag), m * arglam) * ipow[static_cast<std::size_t>(p % 4)];
                sum += term;
                if (p > 4 && std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) &&
                    m * loglam - std::lgamma(p + 1.0) < (m - 1) * loglam - std::lgamma(std::max(p - n, 0) + 1.0))
                    break;
            }
            f.at1[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = sum;
        }
    return f;
}

Fss numeric_fss(const model::DifferentialExpression& expr, cplx lambda, const NumericOptions& opt) {
    const int n = expr.n;
    check_cap(n, lambda, opt);
    const auto un = static_cast<std::size_t>(n);
    CVec state(un * un, cplx{0.0});
    for (std::size_t k = 0; k < un; ++k) state[k * un + k] = 1.0;
    CVec end = propagate(expr, lambda, state, un, nullptr, 0.0, 1.0, expr.breakpoints(), {},
                         [](std::size_t, const CVec&) {}, ode_options(opt));
    Fss f;
    f.kind = FssKind::InitialValue;
    f.n = n;
    f.lambda = lambda;
    f.rho = model::spectral_point(lambda, n).rho;
    f.at0.assign(un, CVec(un, cplx{0.0}));
    f.at1.assign(un, CVec(un));
    for (std::size_t j = 0; j < un; ++j) {
        f.at0[j][j] = 1.0;
        for (std::size_t k = 0; k < un; ++k) f.at1[j][k] = end[k * un + j];
    }
    return f;
}

cplx apply_form(const BoundaryRow& row, const CVec& d0, const CVec& d1) {
    const auto s = static_cast<std::size_t>(row.sigma);
    cplx v = row.a * d0[s] + row.b * d1[s];
    for (const auto& t : row.lower) {
        const auto j = static_cast<std::size_t>(t.order);
        v += t.at0 * d0[j] + t.at1 * d1[j];
    }
    return v;
}

linalg::CMat eta_matrix(const NormalizedBoundaryConditions& bc, const Fss& fss) {
    const auto n = static_cast<std::size_t>(fss.n);
    linalg::CMat eta(n, CVec(n));
    for (std::size_t k = 0; k < n; ++k) {
        const cplx e = fss.eps[k];
        const cplx w = fss.rho * e;
        // z_k at the endpoints without overflow.
        const cplx z0 = fss.in_P[k] ? cplx{1.0} : std::exp(-kI * w);
        const cplx z1 = fss.in_P[k] ? std::exp(kI * w) : cplx{1.0};
        for (std::size_t nu = 0; nu < n; ++nu) {
            const auto& row = bc.rows[nu];
            cplx v = scaled_power(fss.rho, e, row.sigma, row.sigma) * (row.a * z0 + row.b * z1);
            for (const auto& t : row.lower)
                v += scaled_power(fss.rho, e, t.order, row.sigma) * (t.at0 * z0 + t.at1 * z1);
            eta[nu][k] = v;
        }
    }
    return eta;
}

cplx char_det(const OperatorSpec& op, cplx rho, const NumericOptions& opt) {
    if (op.expr.is_model()) return linalg::det(eta_matrix(op.bc, model_fss(op.n(), rho)));
    return linalg::det(boundary_matrix(op.bc, numeric_fss(op.expr, std::pow(rho, op.n()), opt)));
}

cplx char_det_lambda(const OperatorSpec& op, cplx lambda, const NumericOptions& opt) {
    if (op.expr.is_model()) return linalg::det(boundary_matrix(op.bc, power_series_fss(op.n(), lambda)));
    return linalg::det(boundary_matrix(op.bc, numeric_fss(op.expr, lambda, opt)));
}

double eta_residual(const OperatorSpec& op, cplx rho) {
    auto fss = model_fss(op.n(), rho);
    cplx d = linalg::det(eta_matrix(op.bc, fss));
    const auto n = static_cast<std::size_t>(op.n());
    linalg::CMat limit(n, CVec(n));
    for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t k = 0; k < n; ++k) {
            const auto& row = op.bc.rows[nu];
            limit[nu][k] = std::pow(fss.eps[k], row.sigma) * (fss.in_P[k] ? row.a : row.b);
        }
    return std::abs(d - linalg::det(limit));
}

// ------------------------------------------------------------ winding numbers

namespace {

struct ZeroOnContour {};

class PhaseTracker {
public:
    PhaseTracker(const std::function<cplx(cplx)>& F, double tiny) : F_(F), tiny_(tiny) {}

    cplx eval(cplx z) {
        auto key = std::make_pair(z.real(), z.imag());
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        cplx v = F_(z);
        if (!(std::abs(v) > tiny_) || !std::isfinite(std::abs(v))) throw ZeroOnContour{};
        cache_.emplace(key, v);
        max_abs_ = std::max(max_abs_, std::abs(v));
        return v;
    }

    // Total change of arg F along the segment a -> b.
    double segment(cplx a, cplx b) {
        const double len = std::abs(b - a);
        const int m = std::max(4, static_cast<int>(std::ceil(len / 0.25)));
        double total = 0.0;
        cplx za = a, fa = eval(a);
        for (int i = 1; i <= m; ++i) {
            cplx zb = a + (b - a) * (static_cast<double>(i) / m);
            cplx fb = eval(zb);
            total += refine(za, zb, fa, fb, 0);
            za = zb;
            fa = fb;
        }
        return total;
    }

    double max_abs() const { return max_abs_; }

private:
    // |F/F'| at z. A zero of multiplicity k at distance D gives about D/k, so
    // it bounds the distance to the nearest zero from below.
    double newton_distance(cplx z, cplx fz) {
        auto key = std::make_pair(z.real(), z.imag());
        auto it = newton_.find(key);
        if (it != newton_.end()) return it->second;
        const double h = 1e-7 * (1.0 + std::abs(z));
        const cplx d = (F_(z + h) - F_(z - h)) / (2.0 * h);
        const double nu = std::abs(d) > 0.0 ? std::abs(fz / d) : std::numeric_limits<double>::infinity();
        newton_.emplace(key, nu);
        return nu;
    }

    // A segment is accepted only when it is short against the Newton distance
    // at both ends. Otherwise a nearby multiple zero can turn the phase by
    // almost 2 pi between samples and alias to a small increment.
    double refine(cplx a, cplx b, cplx fa, cplx fb, int depth) {
        cplx m = 0.5 * (a + b);
        cplx fm = eval(m);
        double d1 = std::arg(fm / fa), d2 = std::arg(fb / fm), d = std::arg(fb / fa);
        const double len = std::abs(b - a);
        if (std::abs(d1) < 0.5 && std::abs(d2) < 0.5 && std::abs(d1 + d2 - d) < 1e-9 &&
            len <= 0.5 * std::min(newton_distance(a, fa), newton_distance(b, fb)))
            return d;
        if (depth > 44) throw ZeroOnContour{};
        return refine(a, m, fa, fm, depth + 1) + refine(m, b, fm, fb, depth + 1);
    }

    const std::function<cplx(cplx)>& F_;
    double tiny_;
    std::map<std::pair<double, double>, cplx> cache_;
    std::map<std::pair<double, double>, double> newton_;
    double max_abs_ = 0.0;
};

int winding_impl(PhaseTracker& tracker, const std::vector<cplx>& poly) {
    double total = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) total += tracker.segment(poly[i], poly[(i + 1) % poly.size()]);
    const double w = total / (2.0 * kPi);
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-3) throw ZeroOnContour{};
    return static_cast<int>(r);
}

std::vector<cplx> rect(cplx lo, cplx hi) {
    return {lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}};
}

struct RootHit {
    cplx z;
    int multiplicity;
};

class RectangleSearch {
public:
    RectangleSearch(std::function<cplx(cplx)> F, double tiny, int max_depth, double polish_tol)
        : F_(std::move(F)), tracker_(F_, tiny), max_depth_(max_depth), polish_tol_(polish_tol) {}

    int winding(cplx lo, cplx hi) { return winding_impl(tracker_, rect(lo, hi)); }

    void search(cplx lo, cplx hi, int w, int depth, std::vector<RootHit>& out) {
        if (w <= 0) return;
        const double wx = hi.real() - lo.real(), wy = hi.imag() - lo.imag();
        const double size = std::max(wx, wy);
        const double floor_size = 1e-6 * (1.0 + std::abs(0.5 * (lo + hi)));
        if (w == 1) {
            if (auto z = polish(lo, hi, 1)) {
                out.push_back({*z, 1});
                return;
            }
        } else if (depth >= max_depth_ || size < floor_size) {
            auto z = polish(lo, hi, w);
            out.push_back({z.value_or(0.5 * (lo + hi)), w});
            return;
        }
        if (size < floor_size) {
            out.push_back({0.5 * (lo + hi), w});
            return;
        }
        std::string tried;
        for (double frac : {0.4871, 0.5319, 0.4423, 0.5781}) {
            try {
                cplx alo = lo, ahi = hi, blo = lo, bhi = hi;
                if (wx >= wy) {
                    double xm = lo.real() + frac * wx;
                    ahi = {xm, hi.imag()};
                    blo = {xm, lo.imag()};
                } else {
                    double ym = lo.imag() + frac * wy;
                    ahi = {hi.real(), ym};
                    blo = {lo.real(), ym};
                }
                int wa = winding(alo, ahi), wb = winding(blo, bhi);
                if (wa + wb != w) {
                    tried += " " + std::to_string(wa) + "+" + std::to_string(wb);
                    continue;
                }
                search(alo, ahi, wa, depth + 1, out);
                search(blo, bhi, wb, depth + 1, out);
                return;
            } catch (const ZeroOnContour&) {
                tried += " zero";
                continue;
            }
        }
        // Every split line met the noise floor of F: at this size the cell is
        // indistinguishable from a single zero of multiplicity w.
        if (tried.find('+') == std::string::npos && size < 1e-3 * (1.0 + std::abs(0.5 * (lo + hi)))) {
            auto z = polish(lo, hi, w);
            out.push_back({z.value_or(0.5 * (lo + hi)), w});
            return;
        }
        std::ostringstream msg;
        msg << "child winding numbers do not add up to the parent count " << w << " on [" << lo.real() << ", "
            << hi.real() << "] x [" << lo.imag() << ", " << hi.imag() << "]; splits:" << tried;
        fail("WindingMismatch", msg.str());
    }

private:
    cplx dF(cplx z) {
        const double h = 1e-6 * (1.0 + std::abs(z));
        return (F_(z + h) - F_(z - h)) / (2.0 * h);
    }

    // Newton with a finite-difference derivative started at the cell centre;
    // the multiplicity factor restores quadratic convergence at multiple roots.
    // Returns nothing when the iteration leaves the cell.
    std::optional<cplx> polish(cplx lo, cplx hi, int w) {
        const double scale = tracker_.max_abs();
        cplx z = 0.5 * (lo + hi);
        for (int it = 0; it < 60; ++it) {
            cplx f = F_(z);
            if (std::abs(f) < 1e-300) break;
            cplx d = dF(z);
            if (std::abs(d) < 1e-300) break;
            cplx step = static_cast<double>(w) * f / d;
            z -= step;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z)) || std::abs(f) < 1e-16 * scale) break;
        }
        const double mx = 1e-9 * (1.0 + std::abs(z));
        if (z.real() < lo.real() - mx || z.real() > hi.real() + mx || z.imag() < lo.imag() - mx ||
            z.imag() > hi.imag() + mx)
            return std::nullopt;
        if (std::abs(F_(z)) > polish_tol_ * std::max(scale, 1e-300)) return std::nullopt;
        return z;
    }

    std::function<cplx(cplx)> F_;
    PhaseTracker tracker_;
    int max_depth_;
    double polish_tol_;
};

// Searches the rectangle [x0, x1] x [y0, y1] cut into vertical cells.
std::vector<RootHit> strip_search(const std::function<cplx(cplx)>& F, double x0, double x1, double y0, double y1,
                                  double cell, const SearchOptions& opt) {
    std::vector<RootHit> out;
    if (x1 <= x0) return out;
    RectangleSearch rs(F, 1e-280, opt.max_depth, opt.polish_tol);
    const int cells = std::max(1, static_cast<int>(std::ceil((x1 - x0) / cell)));
    const double w = (x1 - x0) / cells;
    double left = x0;
    for (int c = 0; c < cells; ++c) {
        double right = c + 1 == cells ? x1 : x0 + w * (c + 1);
        int tries = 0;
        while (true) {
            try {
                const int wn = rs.winding({left, y0}, {right, y1});
                rs.search({left, y0}, {right, y1}, wn, 0, out);
                break;
            } catch (const ZeroOnContour&) {
                if (++tries > 6) fail("WindingMismatch", "characteristic determinant vanishes on a cell edge");
                right += 0.0137 * tries * (c + 1 == cells ? 1.0 : 1.0);
            }
        }
        left = right;
    }
    return out;
}

} // namespace

int winding_number(const std::function<cplx(cplx)>& F, const std::vector<cplx>& polygon, double scale_hint) {
    PhaseTracker t(F, scale_hint > 0 ? 1e-14 * scale_hint : 1e-280);
    try {
        return winding_impl(t, polygon);
    } catch (const ZeroOnContour&) {
        fail("WindingMismatch", "function vanishes on the contour");
    }
}

// ------------------------------------------------------- characteristic values

namespace {

double circ_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}

double mod2pi(double a) {
    double r = std::fmod(a, 2.0 * kPi);
    return r < 0 ? r + 2.0 * kPi : r;
}

// Eigenvalues on the real axis come back with rounding-level imaginary parts,
// which would flip the branch of rho across arg lambda = 0.
cplx snap_real(cplx lam) {
    return std::abs(lam.imag()) <= 1e-11 * std::abs(lam) ? cplx{lam.real(), 0.0} : lam;
}

void fit_progressions(CharValueSet& set, int n) {
    if (set.values.empty()) return;
    // Tail: the larger half of the values by modulus.
    std::vector<std::size_t> order(set.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> tail;
    const std::size_t start = order.size() / 2;
    for (std::size_t i = start; i < order.size(); ++i) tail.push_back(order[i]);
    const int p = n % 2 == 0 ? 2 : 1;

    RVec centers;
    centers.push_back(mod2pi(set.values[tail.front()].rho_search.real()));
    if (p == 2) {
        double best = -1, bc = centers[0];
        for (auto i : tail) {
            double t = mod2pi(set.values[i].rho_search.real());
            if (circ_dist(t, centers[0]) > best) {
                best = circ_dist(t, centers[0]);
                bc = t;
            }
        }
        if (best > 0.3) centers.push_back(bc);
    }
    std::vector<int> assign(set.values.size(), 0);
    auto nearest = [&](double t) {
        int b = 0;
        for (std::size_t c = 1; c < centers.size(); ++c)
            if (circ_dist(t, centers[c]) < circ_dist(t, centers[static_cast<std::size_t>(b)])) b = static_cast<int>(c);
        return b;
    };
    for (int iter = 0; iter < 50; ++iter) {
        RVec sx(centers.size(), 0.0), sy(centers.size(), 0.0);
        for (auto i : tail) {
            double t = mod2pi(set.values[i].rho_search.real());
            int c = nearest(t);
            sx[static_cast<std::size_t>(c)] += set.values[i].multiplicity * std::cos(t);
            sy[static_cast<std::size_t>(c)] += set.values[i].multiplicity * std::sin(t);
        }
        for (std::size_t c = 0; c < centers.size(); ++c)
            if (sx[c] != 0.0 || sy[c] != 0.0) centers[c] = mod2pi(std::atan2(sy[c], sx[c]));
    }
    set.progressions.assign(centers.size(), Progression{});
    std::vector<CVec> offsets(centers.size());
    for (auto i : tail) {
        const cplx r = set.values[i].rho_search;
        int c = nearest(mod2pi(r.real()));
        const double j = std::round((r.real() - centers[static_cast<std::size_t>(c)]) / (2.0 * kPi));
        offsets[static_cast<std::size_t>(c)].push_back(r - 2.0 * kPi * j);
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        // Median-like robust estimate: the offset of the largest member.
        cplx cc = offsets[c].empty() ? cplx{centers[c]} : offsets[c].back();
        set.progressions[c] = {cc, offsets[c].size()};
    }
    for (std::size_t i = 0; i < set.values.size(); ++i) {
        auto& v = set.values[i];
        int c = nearest(mod2pi(v.rho_search.real()));
        const cplx cc = set.progressions[static_cast<std::size_t>(c)].c;
        const double j = std::round((v.rho_search.real() - cc.real()) / (2.0 * kPi));
        v.progression = c;
        v.fit_residual = std::abs(v.rho_search - 2.0 * kPi * j - cc);
    }
}

} // namespace

CharValueSet find_char_values(const OperatorSpec& op, double R, const SearchOptions& opt) {
    const regularity::RegularityReport rep = regularity::classify(op);
    if (rep.verdict != regularity::Verdict::Regular) fail("NotRegular", "characteristic values need a regular operator");
    const int n = op.n();
    const bool model_op = op.expr.is_model();
    const double H = opt.strip;
    const double rho0 = std::sqrt(opt.inner * opt.inner + H * H) + 0.25;
    const double Lam0 = std::pow(rho0, n);

    std::vector<CharValue> found;
    // Central disk in the lambda plane.
    {
        auto F = [&](cplx lam) { return char_det_lambda(op, lam, opt.numeric); };
        SearchOptions o = opt;
        auto hits = strip_search(F, -Lam0 * 1.0001, Lam0 * 1.0001, -Lam0 * 1.0003, Lam0 * 1.0002, 2.0 * Lam0 * 1.0001, o);
        for (const auto& h : hits) {
            if (std::abs(h.z) >= Lam0) continue;
            const cplx lam = snap_real(h.z);
            auto sp = model::spectral_point(lam, n);
            cplx search = sp.rho;
            if (n % 2 == 0) {
                // Representative with arg in (-pi/n, pi/n].
                const auto eps = regularity::unit_roots(n);
                for (const auto& e : eps) {
                    cplx c = sp.rho * e;
                    if (std::abs(std::arg(c)) <= kPi / n + 1e-12) {
                        search = c;
                        break;
                    }
                }
            }
            found.push_back({sp.rho, search, lam, h.multiplicity, 0, 0.0});
        }
    }
    // Strips in the rho plane.
    const std::vector<int> sides = n % 2 == 0 ? std::vector<int>{1} : std::vector<int>{1, -1};
    for (int side : sides) {
        std::function<cplx(cplx)> F;
        const auto P = auto_partition(n, cplx{static_cast<double>(side)});
        if (model_op) {
            F = [&, P](cplx rho) { return linalg::det(eta_matrix(op.bc, model_fss(n, rho, P))); };
        } else {
            F = [&](cplx rho) { return char_det_lambda(op, std::pow(rho, n), opt.numeric); };
        }
        std::vector<RootHit> hits;
        if (side > 0) {
            hits = strip_search(F, opt.inner, R + 1.0, -H, H, opt.cell, opt);
        } else {
            auto G = [&](cplx w) { return F(-w); };
            hits = strip_search(G, opt.inner, R + 1.0, -H, H, opt.cell, opt);
            for (auto& h : hits) h.z = -h.z;
        }
        for (const auto& h : hits) {
            if (std::abs(h.z) < rho0) continue;
            const cplx lam = snap_real(std::pow(h.z, n));
            auto sp = model::spectral_point(lam, n);
            found.push_back({sp.rho, h.z, lam, h.multiplicity, 0, 0.0});
        }
    }
    // Remove copies of one eigenvalue found in two places.
    std::vector<CharValue> unique;
    for (const auto& v : found) {
        bool dup = false;
        for (auto& u : unique)
            if (std::abs(u.lambda - v.lambda) < 1e-7 * (1.0 + std::abs(v.lambda))) {
                u.multiplicity = std::max(u.multiplicity, v.multiplicity);
                dup = true;
            }
        if (!dup) unique.push_back(v);
    }
    CharValueSet set;
    set.R = R;
    for (const auto& v : unique)
        if (std::abs(v.rho) <= R) set.values.push_back(v);
    std::sort(set.values.begin(), set.values.end(), [](const CharValue& a, const CharValue& b) {
        if (std::abs(std::abs(a.rho) - std::abs(b.rho)) > 1e-12) return std::abs(a.rho) < std::abs(b.rho);
        return std::arg(a.rho) < std::arg(b.rho);
    });
    fit_progressions(set, n);
    return set;
}

// ---------------------------------------------------------- Green function

cplx green(const OperatorSpec& op, double x, double xi, cplx rho, const NumericOptions& opt) {
    const int n = op.n();
    const auto un = static_cast<std::size_t>(n);
    if (op.expr.is_model()) {
        auto fss = model_fss(n, rho);
        auto eta = eta_matrix(op.bc, fss);
        if (std::abs(linalg::det(eta)) < 1e-6 * hadamard(eta)) fail("NearPole", "rho is too close to a characteristic value");
        const double sgn_pow = n - 1;
        CVec epsinv(un);
        for (std::size_t k = 0; k < un; ++k) epsinv[k] = std::pow(fss.eps[k], -sgn_pow);
        // Fundamental kernel g and the boundary forms applied to it.
        cplx g{0.0};
        for (std::size_t k = 0; k < un; ++k) {
            const cplx w = kI * rho * fss.eps[k];
            if (x >= xi && fss.in_P[k]) g += kI * epsinv[k] * std::exp(w * (x - xi));
            if (x < xi && !fss.in_P[k]) g -= kI * epsinv[k] * std::exp(w * (x - xi));
        }
        CVec v(un, cplx{0.0});
        for (std::size_t nu = 0; nu < un; ++nu) {
            const auto& row = op.bc.rows[nu];
            auto term = [&](int j, cplx c0, cplx c1) {
                cplx s{0.0};
                for (std::size_t k = 0; k < un; ++k) {
                    const cplx w = kI * rho * fss.eps[k];
                    const cplx f = scaled_power(rho, fss.eps[k], j, row.sigma) * epsinv[k];
                    if (fss.in_P[k]) s += c1 * kI * f * std::exp(w * (1.0 - xi));
                    else s -= c0 * kI * f * std::exp(-w * xi);
                }
                return s;
            };
            v[nu] = term(row.sigma, row.a, row.b);
            for (const auto& t : row.lower) v[nu] += term(t.order, t.at0, t.at1);
        }
        CVec c = linalg::solve(eta, v);
        cplx G = g;
        for (std::size_t k = 0; k < un; ++k) G -= c[k] * fss.z(static_cast<int>(k), x);
        return G / (static_cast<double>(n) * std::pow(rho, n - 1));
    }
    // Variation of constants with the Cauchy function started at xi.
    const cplx lambda = std::pow(rho, n);
    check_cap(n, lambda, opt);
    CVec state(un * un, cplx{0.0});
    for (std::size_t k = 0; k < un; ++k) state[k * un + k] = 1.0;
    CVec Yx(un);
    CVec endY = propagate(op.expr, lambda, state, un, nullptr, 0.0, 1.0, op.expr.breakpoints(), {x},
                          [&](std::size_t, const CVec& y) {
                              for (std::size_t k = 0; k < un; ++k) Yx[k] = y[k * un];
                          },
                          ode_options(opt));
    Fss fss;
    fss.kind = FssKind::InitialValue;
    fss.n = n;
    fss.at0.assign(un, CVec(un, cplx{0.0}));
    fss.at1.assign(un, CVec(un));
    for (std::size_t j = 0; j < un; ++j) {
        fss.at0[j][j] = 1.0;
        for (std::size_t k = 0; k < un; ++k) fss.at1[j][k] = endY[k * un + j];
    }
    auto M = boundary_matrix(op.bc, fss);
    if (std::abs(linalg::det(M)) < 1e-6 * hadamard(M)) fail("NearPole", "rho is too close to a characteristic value");
    CVec K(un, cplx{0.0});
    K[un - 1] = kI;
    cplx Kx{0.0};
    RVec stops;
    if (x >= xi) stops.push_back(x);
    CVec endK = propagate(op.expr, lambda, K, 1, nullptr, xi, 1.0, op.expr.breakpoints(), stops,
                          [&](std::size_t, const CVec& y) { Kx = y[0]; }, ode_options(opt));
    CVec zero(un, cplx{0.0});
    CVec rhs(un);
    for (std::size_t nu = 0; nu < un; ++nu) rhs[nu] = -apply_form(op.bc.rows[nu], zero, endK);
    CVec c = linalg::solve(M, rhs);
    cplx G = x >= xi ? Kx : cplx{0.0};
    for (std::size_t k = 0; k < un; ++k) G += c[k] * Yx[k];
    return G;
}

// --------------------------------------------------------------- resolvents

namespace {

} // namespace

CVec Resolvent::free_term(cplx) const { fail("Unsupported", "the free term is defined for the model operator only"); }

namespace {

class ModelResolvent final : public Resolvent {
public:
    ModelResolvent(const OperatorSpec& op, const model::SampledFunction& f, const RVec& grid, double rho_max)
        : op_(op), n_(op.n()), grid_(grid) {
        RVec knots = grid;
        knots.push_back(0.0);
        knots.push_back(1.0);
        for (double b : f.breakpoints()) knots.push_back(b);
        knots_ = sorted_unique(knots);
        for (double x : grid)
            grid_index_.push_back(static_cast<std::size_t>(
                std::lower_bound(knots_.begin(), knots_.end(), x) - knots_.begin()));
        const auto gl = model::gauss_legendre(12);
        offsets_.push_back(0);
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            const double lo = knots_[i], hi = knots_[i + 1], len = hi - lo;
            const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len * std::max(rho_max, 1.0) / 1.5)));
            const double h = len / static_cast<double>(m);
            for (std::size_t p = 0; p < m; ++p)
                for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                    double xi = lo + h * (static_cast<double>(p) + 0.5 * (gl.nodes[q] + 1.0));
                    nodes_.push_back(xi);
                    weights_.push_back(0.5 * h * gl.weights[q]);
                    fvals_.push_back(f(xi));
                }
            offsets_.push_back(nodes_.size());
        }
    }

    CVec free_term(cplx rho) const override {
        const auto un = static_cast<std::size_t>(n_);
        auto fss = model_fss(n_, rho);
        auto C = integrals(rho, fss);
        CVec out(grid_.size(), cplx{0.0});
        for (std::size_t g = 0; g < grid_.size(); ++g)
            for (std::size_t k = 0; k < un; ++k) {
                const cplx e = std::pow(fss.eps[k], -(n_ - 1));
                out[g] += fss.in_P[k] ? kI * e * C[k][grid_index_[g]] : -kI * e * C[k][grid_index_[g]];
            }
        return out;
    }

    CVec scaled_apply(cplx rho) const override {
        const auto un = static_cast<std::size_t>(n_);
        auto fss = model_fss(n_, rho);
        const std::size_t K = knots_.size();
        auto C = integrals(rho, fss);
        CVec epsinv(un);
        for (std::size_t k = 0; k < un; ++k) epsinv[k] = std::pow(fss.eps[k], -(n_ - 1));
        auto eta = eta_matrix(op_.bc, fss);
        CVec v(un, cplx{0.0});
        for (std::size_t nu = 0; nu < un; ++nu) {
            const auto& row = op_.bc.rows[nu];
            auto term = [&](int j, cplx c0, cplx c1) {
                cplx s{0.0};
                for (std::size_t k = 0; k < un; ++k) {
                    const cplx f = scaled_power(rho, fss.eps[k], j, row.sigma) * epsinv[k];
                    if (fss.in_P[k]) s += c1 * kI * f * C[k][K - 1];
                    else s -= c0 * kI * f * C[k][0];
                }
                return s;
            };
            v[nu] = term(row.sigma, row.a, row.b);
            for (const auto& t : row.lower) v[nu] += term(t.order, t.at0, t.at1);
        }
        CVec c = linalg::solve(eta, v);
        CVec out(grid_.size());
        for (std::size_t g = 0; g < grid_.size(); ++g) {
            const std::size_t i = grid_index_[g];
            const double x = grid_[g];
            cplx s{0.0};
            for (std::size_t k = 0; k < un; ++k) {
                s += fss.in_P[k] ? kI * epsinv[k] * C[k][i] : -kI * epsinv[k] * C[k][i];
                s -= c[k] * fss.z(static_cast<int>(k), x);
            }
            out[g] = s;
        }
        return out;
    }

    CVec apply_lambda(cplx lambda) const override {
        cplx rho = model::spectral_point(lambda, n_).rho;
        CVec v = scaled_apply(rho);
        const cplx d = static_cast<double>(n_) * std::pow(rho, n_ - 1);
        for (auto& e : v) e /= d;
        return v;
    }

private:
    // C[k][i]: integral of exp(i rho eps_k (t_i - xi)) f(xi) over [0, t_i] for
    // k in P and over [t_i, 1] otherwise.
    std::vector<CVec> integrals(cplx rho, const Fss& fss) const {
        const auto un = static_cast<std::size_t>(n_);
        const std::size_t K = knots_.size();
        std::vector<CVec> C(un, CVec(K, cplx{0.0}));
        for (std::size_t k = 0; k < un; ++k) {
            const cplx w = kI * rho * fss.eps[k];
            if (fss.in_P[k]) {
                for (std::size_t i = 1; i < K; ++i) {
                    cplx acc = std::exp(w * (knots_[i] - knots_[i - 1])) * C[k][i - 1];
                    for (std::size_t q = offsets_[i - 1]; q < offsets_[i]; ++q)
                        acc += weights_[q] * std::exp(w * (knots_[i] - nodes_[q])) * fvals_[q];
                    C[k][i] = acc;
                }
            } else {
                for (std::size_t i = K - 1; i-- > 0;) {
                    cplx acc = std::exp(w * (knots_[i] - knots_[i + 1])) * C[k][i + 1];
                    for (std::size_t q = offsets_[i]; q < offsets_[i + 1]; ++q)
                        acc += weights_[q] * std::exp(w * (knots_[i] - nodes_[q])) * fvals_[q];
                    C[k][i] = acc;
                }
            }
        }
        return C;
    }

    OperatorSpec op_;
    int n_;
    RVec grid_;
    RVec knots_;
    std::vector<std::size_t> grid_index_;
    RVec nodes_, weights_;
    CVec fvals_;
    std::vector<std::size_t> offsets_;
};

class NumericResolvent final : public Resolvent {
public:
    NumericResolvent(const OperatorSpec& op, const model::SampledFunction& f, const RVec& grid, NumericOptions opt)
        : op_(op), f_(f), grid_(grid), opt_(opt) {
        RVec b = op.expr.breakpoints();
        for (double t : f.breakpoints()) b.push_back(t);
        breaks_ = sorted_unique(b);
    }

    CVec apply_lambda(cplx lambda) const override {
        const int n = op_.n();
        const auto un = static_cast<std::size_t>(n);
        check_cap(n, lambda, opt_);
        const std::size_t ncols = un + 1;
        CVec state(un * ncols, cplx{0.0});
        for (std::size_t k = 0; k < un; ++k) state[k * un + k] = 1.0;
        std::vector<CVec> vals(grid_.size(), CVec(ncols));
        CVec end = propagate(op_.expr, lambda, state, ncols, &f_, 0.0, 1.0, breaks_, grid_,
                             [&](std::size_t i, const CVec& y) {
                                 for (std::size_t c = 0; c < ncols; ++c) vals[i][c] = y[c * un];
                             },
                             ode_options(opt_));
        Fss fss;
        fss.n = n;
        fss.at0.assign(un, CVec(un, cplx{0.0}));
        fss.at1.assign(un, CVec(un));
        for (std::size_t j = 0; j < un; ++j) {
            fss.at0[j][j] = 1.0;
            for (std::size_t k = 0; k < un; ++k) fss.at1[j][k] = end[k * un + j];
        }
        auto M = boundary_matrix(op_.bc, fss);
        CVec zero(un, cplx{0.0}), dp(un);
        for (std::size_t j = 0; j < un; ++j) dp[j] = end[un * un + j];
        CVec rhs(un);
        for (std::size_t nu = 0; nu < un; ++nu) rhs[nu] = -apply_form(op_.bc.rows[nu], zero, dp);
        CVec c = linalg::solve(M, rhs);
        CVec out(grid_.size());
        for (std::size_t g = 0; g < grid_.size(); ++g) {
            cplx s = vals[g][un];
            for (std::size_t k = 0; k < un; ++k) s += c[k] * vals[g][k];
            out[g] = s;
        }
        return out;
    }

    CVec scaled_apply(cplx rho) const override {
        const int n = op_.n();
        CVec v = apply_lambda(std::pow(rho, n));
        const cplx d = static_cast<double>(n) * std::pow(rho, n - 1);
        for (auto& e : v) e *= d;
        return v;
    }

private:
    OperatorSpec op_;
    model::SampledFunction f_;
    RVec grid_;
    RVec breaks_;
    NumericOptions opt_;
};

} // namespace

std::unique_ptr<Resolvent> make_resolvent(const OperatorSpec& op, const model::SampledFunction& f, const RVec& grid,
                                          const ResolventOptions& opt) {
    if (op.expr.is_model()) return std::make_unique<ModelResolvent>(op, f, grid, opt.rho_max);
    return std::make_unique<NumericResolvent>(op, f, grid, opt.numeric);
}

} // namespace equiconv::solver
