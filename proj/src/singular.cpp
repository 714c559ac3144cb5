#include "equiconv/singular.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "equiconv/errors.hpp"
#include "equiconv/model.hpp"

namespace equiconv::singular {

namespace {

// sin(r d)/d with its limit r at d = 0.
double sinc_r(double d, double r) {
    const double z = r * d;
    if (std::abs(z) < 1e-4) return r * (1.0 - z * z / 6.0);
    return std::sin(z) / d;
}

double bound_state(double x, double s, double h) { return 2.0 * std::abs(h) * std::exp(h * (x + s)); }

bool has_bound_state(double h, double t) { return h < 0.0 && std::isfinite(h) && t >= -h * h; }

} // namespace

double theta0(double x, double s, double t) {
    if (t <= 0.0) return 0.0;
    return sinc_r(x - s, std::sqrt(t)) / kPi;
}

double theta1_inf(double x, double s, double t) {
    if (t <= 0.0) return 0.0;
    const double r = std::sqrt(t);
    return (sinc_r(x - s, r) - sinc_r(x + s, r)) / kPi;
}

double theta1_h(double x, double s, double t, double h) {
    if (std::isnan(h)) fail("InvalidInput", "h is NaN");
    if (std::isinf(h)) return theta1_inf(x, s, t);
    double v = has_bound_state(h, t) ? bound_state(x, s, h) : 0.0;
    if (t <= 0.0) return v;
    // (nu cos nu x + h sin nu x)(nu cos nu s + h sin nu s)/(nu^2 + h^2)
    //   = cos nu x cos nu s + (h nu sin nu a - h^2 cos nu a)/(nu^2 + h^2), a = x + s.
    const double r = std::sqrt(t), a = x + s;
    v += (sinc_r(x - s, r) + sinc_r(a, r)) / kPi;
    if (h != 0.0) {
        auto g = [&](double nu) { return cplx{(h * nu * std::sin(nu * a) - h * h * std::cos(nu * a)) / (nu * nu + h * h)}; };
        v += 2.0 / kPi * std::real(model::quad(g, 0.0, r, a + std::abs(h), 1e-13));
    }
    return v;
}

Corrections corrections(double x, double s, double h) {
    if (std::isnan(h) || std::isinf(h)) fail("InvalidInput", "corrections need finite h");
    Corrections c;
    const double a = x + s, d = std::abs(x - s), k = std::abs(h);
    // int_0^inf nu sin(nu a)/(nu^2 + h^2) = (pi/2) e^{-|h| a} for a > 0, and 0 at a = 0.
    if (a > 0.0) c.I1 = 0.5 * h * std::exp(-k * a);
    // int_0^inf cos(nu d)/(nu^2 + h^2) = (pi/(2|h|)) e^{-|h| d}.
    if (h != 0.0) c.I2 = -k * std::exp(-k * d);
    if (h < 0.0) c.I3 = h * h * std::exp(h * a);
    return c;
}

Potential Potential::zero() { return {}; }

Potential Potential::box(double height, double radius) {
    Potential p;
    p.label = "box";
    p.q = [=](double x) { return x <= radius ? height : 0.0; };
    p.support_radius = radius;
    return p;
}

Potential Potential::bump(double height, double radius) {
    Potential p;
    p.label = "bump";
    p.q = [=](double x) {
        if (x >= radius) return 0.0;
        const double u = 1.0 - (x / radius) * (x / radius);
        return height * u * u;
    };
    p.support_radius = radius;
    return p;
}

SpectralOracle::SpectralOracle(const Potential& q, double h, double t_max, const OracleOptions& opt)
    : h_(h), t_max_(t_max) {
    if (std::isnan(h) || !(opt.b_max > 0.0) || opt.N < 10) fail("InvalidInput", "oracle needs b_max > 0, N >= 10");
    if (opt.b_max < 4.0 * q.support_radius) fail("InvalidInput", "b_max must be at least 4x the potential support");
    const double need = 20.0 * std::sqrt(std::max(t_max, 1.0)) * opt.b_max / kPi;
    if (opt.N < need)
        fail("ResolutionTooCoarse", "N = " + std::to_string(opt.N) + " < " + std::to_string(std::ceil(need)));
    dx_ = opt.b_max / opt.N;
    const double inv = 1.0 / (dx_ * dx_);
    const bool dirichlet = std::isinf(h);
    offset_ = dirichlet ? 1 : 0;
    const std::size_t n = static_cast<std::size_t>(opt.N) - offset_;
    RVec d(n), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = 2.0 * inv + q.q(static_cast<double>(i + offset_) * dx_);
        if (i + 1 < n) e[i] = -inv;
    }
    if (!dirichlet) {
        // Ghost node y_{-1} = y_1 - 2 dx h y_0, symmetrized with trapezoid weight 1/2 at node 0.
        d[0] = 2.0 * (1.0 + dx_ * h) * inv + q.q(0.0);
        e[0] = -std::sqrt(2.0) * inv;
    }
    double vl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        vl = std::min(vl, d[i] - std::abs(e[i]) - (i ? std::abs(e[i - 1]) : 0.0));
    vl -= 1.0;
    if (t_max <= vl) return;

    lapack_int m = 0;
    RVec w(n), dd = d, ee = e;
    std::vector<lapack_int> isuppz(2 * n);
    RVec zdummy(1);
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'V', static_cast<lapack_int>(n), dd.data(), ee.data(), vl,
                                     t_max, 0, 0, 0.0, &m, w.data(), zdummy.data(), 1, isuppz.data());
    if (info != 0) fail("Internal", "dstevr count failed, info " + std::to_string(info));
    if (m == 0) return;
    RVec z(n * static_cast<std::size_t>(m));
    dd = d;
    ee = e;
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n), dd.data(), ee.data(), 0.0, 0.0, 1, m,
                          0.0, &m, w.data(), z.data(), static_cast<lapack_int>(n), isuppz.data());
    if (info != 0) fail("Internal", "dstevr failed, info " + std::to_string(info));
    for (lapack_int j = 0; j < m; ++j) {
        if (w[static_cast<std::size_t>(j)] > t_max) continue;
        RVec y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = (!dirichlet && i == 0) ? 0.5 : 1.0;
            y[i] = z[static_cast<std::size_t>(j) * n + i] / std::sqrt(wt * dx_);
        }
        // Fix the sign so phi is positive near the origin; the projector does not depend on it.
        if (y[offset_ ? 0 : 1] < 0.0)
            for (auto& v : y) v = -v;
        lambda_.push_back(w[static_cast<std::size_t>(j)]);
        vectors_.push_back(std::move(y));
    }
}

double SpectralOracle::phi(std::size_t j, double x) const {
    const RVec& y = vectors_[j];
    auto node = [&](long k) -> double {
        const long i = k - static_cast<long>(offset_);
        if (i < 0 || i >= static_cast<long>(y.size())) return 0.0;
        return y[static_cast<std::size_t>(i)];
    };
    const double u = x / dx_;
    const long k = static_cast<long>(std::floor(u));
    const double f = u - static_cast<double>(k);
    return (1.0 - f) * node(k) + f * node(k + 1);
}

double SpectralOracle::theta(double x, double s, double t) const {
    if (t > t_max_ + 1e-12 * std::max(1.0, std::abs(t_max_))) fail("InvalidInput", "t exceeds the oracle's t_max");
    double v = 0.0;
    for (std::size_t j = 0; j < lambda_.size() && lambda_[j] <= t; ++j) v += phi(j, x) * phi(j, s);
    return v;
}

double oracle_spectral_function(const Potential& q, double h, double x, double s, double t, const OracleOptions& opt) {
    return SpectralOracle(q, h, t, opt).theta(x, s, t);
}

double validate_bound_state(double h, double b, const OracleOptions& opt) {
    if (!(h < 0.0) || std::isinf(h)) fail("InvalidInput", "bound state needs finite h < 0");
    const double t = -0.5 * h * h;
    SpectralOracle oracle(Potential::zero(), h, t, opt);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i <= 10; ++i)
        for (int k = 0; k <= 10; ++k) {
            const double x = b * i / 10.0, s = b * k / 10.0;
            const double exact = bound_state(x, s, h);
            diff = std::max(diff, std::abs(oracle.theta(x, s, t) - exact));
            scale = std::max(scale, exact);
        }
    const double rel = diff / scale;
    if (rel > 0.05) fail("OracleMismatch", "bound-state normalization off by " + std::to_string(rel));
    return rel;
}

ResidualCurves levitan_marchenko_residuals(const Potential& q, double h, const RVec& t_list, double b,
                                           const ResidualOptions& opt) {
    if (t_list.empty() || !(b > 0.0) || opt.grid < 1) fail("InvalidInput", "need t values, b > 0 and grid >= 1");
    ResidualCurves out;
    out.h = h;
    out.t = t_list;
    const double t_max = *std::max_element(t_list.begin(), t_list.end());
    SpectralOracle oracle(q, h, t_max, opt.oracle);
    const std::size_t g = static_cast<std::size_t>(opt.grid) + 1;
    for (double t : t_list) {
        RVec r5(g * g), r6(g * g), rd(g * g);
        for_each_index(g * g, opt.exec, [&](std::size_t idx) {
            const double x = b * static_cast<double>(idx / g) / opt.grid;
            const double s = b * static_cast<double>(idx % g) / opt.grid;
            const double th1 = theta1_h(x, s, t, h);
            r5[idx] = std::abs(oracle.theta(x, s, t) - th1);
            if (std::isinf(h)) return;
            const double diff = th1 - theta0(x, s, t);
            r6[idx] = std::abs(diff - corrections(x, s, h).sum());
            rd[idx] = std::abs(diff - (t > 0.0 ? sinc_r(x + s, std::sqrt(t)) / kPi : 0.0));
        });
        out.oracle_gap.push_back(*std::max_element(r5.begin(), r5.end()));
        out.correction_residual.push_back(std::isinf(h) ? std::nan("") : *std::max_element(r6.begin(), r6.end()));
        out.oscillation_residual.push_back(std::isinf(h) ? std::nan("") : *std::max_element(rd.begin(), rd.end()));
    }
    return out;
}

double oracle_agreement(double h, double t, double b, const OracleOptions& opt, int grid) {
    SpectralOracle oracle(Potential::zero(), h, t, opt);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i <= grid; ++i)
        for (int k = 0; k <= grid; ++k) {
            const double x = b * i / grid, s = b * k / grid;
            const double exact = theta1_h(x, s, t, h);
            diff = std::max(diff, std::abs(oracle.theta(x, s, t) - exact));
            scale = std::max(scale, std::abs(exact));
        }
    return diff / scale;
}

} // namespace equiconv::singular
