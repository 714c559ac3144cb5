#include "equiconv/ode.hpp"

#include <algorithm>
#include <cmath>

#include "equiconv/errors.hpp"

namespace equiconv::ode {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

CVec integrate(const Rhs& f, double x0, double x1, CVec y, const RVec& stops, const Observer& observer,
               const Options& opt) {
    const std::size_t m = y.size();
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    RVec targets;
    for (double s : stops)
        if ((s - x0) * dir > 0.0 && (x1 - s) * dir >= 0.0) targets.push_back(s);
    if (targets.empty() || targets.back() != x1) targets.push_back(x1);
    const std::size_t reported = stops.size();

    CVec k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), tmp(m), ynew(m);
    double x = x0;
    double h = std::min(1e-2, std::abs(x1 - x0) + 1e-300) * dir;
    std::size_t steps = 0;
    f(x, y, k1);
    std::size_t stop_index = 0;
    auto report_until = [&](double at) {
        while (stop_index < reported && (at - stops[stop_index]) * dir >= 0.0) {
            if (stops[stop_index] == at) observer(stop_index, y);
            ++stop_index;
        }
    };
    report_until(x0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double target = targets[t];
        while ((target - x) * dir > 0.0) {
            if (++steps > opt.max_steps) fail("CapExceeded", "ODE step budget exhausted");
            bool last = false;
            if ((x + h - target) * dir >= 0.0) {
                h = target - x;
                last = true;
            }
            for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * a21 * k1[i];
            f(x + c2 * h, tmp, k2);
            for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(x + c3 * h, tmp, k3);
            for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(x + c4 * h, tmp, k4);
            for (std::size_t i = 0; i < m; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(x + c5 * h, tmp, k5);
            for (std::size_t i = 0; i < m; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            const double xe = last ? target : x + h;
            f(xe, tmp, k6);
            for (std::size_t i = 0; i < m; ++i)
                ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(xe, ynew, k7);
            double err = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (err <= 1.0) {
                x = xe;
                y.swap(ynew);
                k1.swap(k7);
                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (!last) h *= fac;
                else h = dir * std::max(std::abs(h), std::abs(h) * fac);
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (std::abs(h) < opt.h_min) fail("StepFailure", "ODE step size underflow");
            }
        }
        report_until(target);
    }
    return y;
}

} // namespace equiconv::ode
