#include "test_main.hpp"

#include "equiconv/errors.hpp"
#include "equiconv/model.hpp"
#include "equiconv/singular.hpp"

using namespace equiconv;
using namespace equiconv::singular;

namespace {

double simpson(const std::function<double(double)>& g, double a, double b, int m = 20000) {
    const double h = (b - a) / m;
    double s = g(a) + g(b);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("closed-form spectral functions") {
    CHECK(testutil::close(theta0(0.3, 0.3, kPi * kPi), 1.0, 1e-15));
    CHECK(theta0(0.3, 0.5, -1.0) == 0.0);
    CHECK(theta1_inf(0.3, 0.5, -1.0) == 0.0);
    CHECK(theta1_h(0.3, 0.5, -1.0, 1.0) == 0.0);
    CHECK(theta0(0.2, 0.7, 30.0) == theta0(0.7, 0.2, 30.0));
    for (double s : {0.0, 0.4, 2.0}) CHECK(std::abs(theta1_inf(0.0, s, 50.0)) < 1e-15);
    const double x = 0.37, t = 45.0, r = std::sqrt(t);
    CHECK(testutil::close(theta1_inf(x, x, t), 2.0 / kPi * (r / 2.0 - std::sin(2.0 * x * r) / (4.0 * x)), 1e-13));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0), ut(0.5, 400.0);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), tt = ut(rng), rr = std::sqrt(tt);
        const double oracle =
            2.0 / kPi * simpson([&](double nu) { return std::sin(nu * a) * std::sin(nu * b); }, 0.0, rr, 4000);
        CHECK(testutil::close(theta1_inf(a, b, tt), oracle, 1e-10));
        CHECK(testutil::close(theta1_inf(a, b, tt), theta1_inf(b, a, tt), 1e-10));
    }
}

TEST_CASE("Robin spectral function") {
    const double x = 0.3, s = 0.8, t = 64.0, r = 8.0;
    auto direct = [&](double h) {
        return 2.0 / kPi * simpson([&](double nu) {
                   if (nu == 0.0 && h == 0.0) return 1.0;
                   return (nu * std::cos(nu * x) + h * std::sin(nu * x)) * (nu * std::cos(nu * s) + h * std::sin(nu * s)) /
                          (nu * nu + h * h);
               }, 0.0, r);
    };
    for (double h : {0.0, 1.0, 2.5, -1.0}) {
        double want = direct(h);
        if (h < 0.0) want += 2.0 * std::abs(h) * std::exp(h * (x + s));
        CHECK_MESSAGE(testutil::close(theta1_h(x, s, t, h), want, 1e-10), h << " " << theta1_h(x, s, t, h) - want);
        CHECK(testutil::close(theta1_h(x, s, t, h), theta1_h(s, x, t, h), 1e-10));
    }
    const double neumann = 2.0 / kPi * simpson([&](double nu) { return std::cos(nu * x) * std::cos(nu * s); }, 0.0, r);
    CHECK(testutil::close(theta1_h(x, s, t, 0.0), neumann, 1e-10));
    CHECK(std::abs(theta1_h(x, s, t, 100.0) - theta1_inf(x, s, t)) < 0.05);
    CHECK(std::abs(theta1_h(x, s, t, 1000.0) - theta1_inf(x, s, t)) < std::abs(theta1_h(x, s, t, 100.0) - theta1_inf(x, s, t)));
    CHECK(theta1_h(x, s, t, kInfinity) == theta1_inf(x, s, t));
    CHECK(testutil::close(theta1_h(x, s, -0.5, -1.0), 2.0 * std::exp(-(x + s)), 1e-15));
    CHECK(theta1_h(x, s, -2.0, -1.0) == 0.0);
}

TEST_CASE("printed corrections") {
    CHECK(corrections(0.2, 0.4, 1.0).I3 == 0.0);
    CHECK(testutil::close(corrections(0.5, 0.5, 1.0).I2, -1.0, 1e-15));
    CHECK(corrections(0.2, 0.6, -1.5).I1 == corrections(0.6, 0.2, -1.5).I1);
    CHECK(testutil::close(corrections(0.2, 0.6, -1.5).I3, 2.25 * std::exp(-1.2), 1e-15));
    // Quadrature oracles for the closed forms, with the tail beyond 400 bounded by the oscillation.
    for (double h : {1.0, -2.0, 0.5})
        for (auto [x, s] : {std::pair{0.3, 0.5}, std::pair{0.1, 0.9}}) {
            const auto c = corrections(x, s, h);
            const double a = x + s, d = std::abs(x - s);
            auto i1 = model::quad([&](double nu) { return cplx{nu * std::sin(nu * a) / (nu * nu + h * h)}; }, 0.0, 4000.0, a,
                                  1e-12);
            auto tail = model::quad([&](double nu) { return cplx{std::cos(nu * a) * (nu * nu - h * h) / std::pow(nu * nu + h * h, 2)}; },
                                    4000.0, 400000.0, a, 1e-13);
            const double I1 = h / kPi * (std::real(i1) + std::cos(4000.0 * a) * 4000.0 / (4000.0 * 4000.0 + h * h) / a -
                                         std::real(tail) / a);
            CHECK(testutil::close(c.I1, I1, 1e-6));
            auto i2 = model::quad([&](double nu) { return cplx{std::cos(nu * d) / (nu * nu + h * h)}; }, 0.0, 4000.0,
                                  d + 1.0, 1e-13);
            CHECK(testutil::close(c.I2, -2.0 * h * h / kPi * std::real(i2), 1e-6));
        }
    CHECK_THROWS_AS(corrections(0.1, 0.2, kInfinity), Error);
}

TEST_CASE("finite-difference oracle") {
    OracleOptions o;
    for (double h : {kInfinity, 1.0, 0.0}) CHECK(oracle_agreement(h, 100.0, 1.0, o) < 0.02);
    CHECK(validate_bound_state(-1.0) < 0.05);
    SpectralOracle dir(Potential::zero(), kInfinity, 100.0, o);
    CHECK(dir.theta(0.3, 0.4, 0.001) == 0.0);
    CHECK(testutil::close(dir.eigenvalues().front(), kPi * kPi / (40.0 * 40.0), 1e-4));
    double prev = -1.0;
    for (double t : {1.0, 10.0, 30.0, 60.0, 100.0}) {
        const double v = dir.theta(0.45, 0.45, t);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(testutil::close(dir.theta(0.2, 0.7, 80.0), dir.theta(0.7, 0.2, 80.0), 1e-12));
    CHECK_THROWS_AS(SpectralOracle(Potential::zero(), 1.0, 100.0, OracleOptions{40.0, 1000}), Error);
    try {
        SpectralOracle(Potential::zero(), 1.0, 100.0, OracleOptions{40.0, 1000});
    } catch (const Error& e) {
        CHECK(e.code() == "ResolutionTooCoarse");
    }
    CHECK_THROWS_AS(SpectralOracle(Potential::box(1.0, 20.0), 1.0, 10.0, o), Error);
    CHECK_THROWS_AS(dir.theta(0.1, 0.1, 200.0), Error);
}

TEST_CASE("half-line spectral function residuals") {
    ResidualOptions o;
    o.grid = 10;
    auto z = levitan_marchenko_residuals(Potential::zero(), 1.0, {25.0, 100.0}, 1.0, o);
    for (double v : z.oracle_gap) CHECK(v < 0.02 * 10.0 / kPi * 2.0);
    CHECK(z.correction_residual[1] > z.correction_residual[0]);
    auto inf = levitan_marchenko_residuals(Potential::zero(), kInfinity, {25.0, 100.0}, 1.0, o);
    CHECK(std::isnan(inf.correction_residual[0]));
    CHECK(inf.oracle_gap[1] < 0.1);
    // A nonzero potential moves the oracle away from the zero-potential closed form.
    auto q = levitan_marchenko_residuals(Potential::bump(5.0, 0.5), 1.0, {4.0, 100.0}, 1.0, o);
    CHECK(q.oracle_gap[0] > 0.05);
    ResidualOptions serial = o;
    serial.exec = Exec::Serial;
    auto zs = levitan_marchenko_residuals(Potential::zero(), 1.0, {25.0, 100.0}, 1.0, serial);
    CHECK(zs.oracle_gap == z.oracle_gap);
    CHECK_THROWS_AS(levitan_marchenko_residuals(Potential::zero(), 1.0, {}, 1.0, o), Error);
}
