#include "test_main.hpp"

#include <algorithm>

#include "equiconv/catalog.hpp"
#include "equiconv/errors.hpp"
#include "equiconv/regularity.hpp"
#include "equiconv/solver.hpp"

using namespace equiconv;
using namespace equiconv::solver;

namespace {

model::OperatorSpec shifted_dirichlet(double c) {
    auto op = catalog::dirichlet2();
    op.expr.coefficients[0] = model::CoefficientDescriptor::polynomial({cplx{c}});
    return op;
}

// Dirichlet eigenvalues of -y'' + x y by RK4 shooting and bisection.
double shoot(double lam) {
    const int N = 4000;
    const double h = 1.0 / N;
    double y = 0.0, v = 1.0;
    auto acc = [&](double x, double yy) { return (x - lam) * yy; };
    for (int i = 0; i < N; ++i) {
        double x = i * h;
        double k1y = v, k1v = acc(x, y);
        double k2y = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h, y + 0.5 * h * k1y);
        double k3y = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h, y + 0.5 * h * k2y);
        double k4y = v + h * k3v, k4v = acc(x + h, y + h * k3y);
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    return y;
}

double shooting_eigenvalue(double lo, double hi) {
    double flo = shoot(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi), fm = shoot(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("automatic partition") {
    auto P = auto_partition(2, cplx{3.0, 0.0});
    CHECK(P[0]);
    CHECK_FALSE(P[1]);
    P = auto_partition(2, cplx{3.0, -1.0});
    CHECK_FALSE(P[0]);
    CHECK(P[1]);
    P = auto_partition(3, cplx{5.0, 0.1});
    CHECK(std::count(P.begin(), P.end(), true) == 2);
}

TEST_CASE("winding number of z^3") {
    auto F = [](cplx z) { return z * z * z; };
    std::vector<cplx> sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    CHECK(winding_number(F, sq) == 3);
    std::vector<cplx> off{{2, 2}, {3, 2}, {3, 3}, {2, 3}};
    CHECK(winding_number(F, off) == 0);
    std::vector<cplx> through{{0, -1}, {1, -1}, {1, 1}, {0, 1}};
    CHECK_THROWS_AS(winding_number(F, through), Error);
}

TEST_CASE("power series basis matches trigonometric closed forms") {
    const cplx lam{7.3, 1.2};
    auto f = power_series_fss(2, lam);
    const cplx k = std::sqrt(lam);
    CHECK(testutil::close(f.at1[0][0], std::cos(k), 1e-13));
    CHECK(testutil::close(f.at1[0][1], kI * std::sin(k) / k, 1e-13));
    CHECK(testutil::close(f.at1[1][1], std::cos(k), 1e-13));
    CHECK(std::abs(char_det_lambda(catalog::dirichlet2(), cplx{kPi * kPi})) < 1e-13);
}

TEST_CASE("numeric basis for a constant potential") {
    const double c = 2.5;
    auto op = shifted_dirichlet(c);
    const cplx lam{40.0, 3.0};
    auto f = numeric_fss(op.expr, lam);
    const cplx k = std::sqrt(lam - c);
    CHECK(testutil::close(f.at1[0][0], std::cos(k), 1e-9));
    CHECK(testutil::close(f.at1[0][1], kI * std::sin(k) / k, 1e-9));
    NumericOptions small{1e-11, 3.0};
    CHECK_THROWS_AS(numeric_fss(op.expr, cplx{100.0}, small), Error);
}

TEST_CASE("Dirichlet Green function against the sine kernel") {
    auto op = catalog::dirichlet2();
    for (cplx rho : {cplx{2.3, 0.0}, cplx{7.1, 0.4}, cplx{11.0, -0.8}, cplx{0.6, 2.0}}) {
        for (double x : {0.1, 0.45, 0.9})
            for (double xi : {0.2, 0.45, 0.77}) {
                const double lo = std::min(x, xi), hi = std::max(x, xi);
                cplx oracle = std::sin(rho * lo) * std::sin(rho * (1.0 - hi)) / (rho * std::sin(rho));
                CHECK(testutil::close(green(op, x, xi, rho), oracle, 1e-12 * (1.0 + std::abs(oracle))));
            }
    }
    CHECK_THROWS_AS(green(op, 0.3, 0.6, cplx{kPi + 1e-9}), Error);
}

TEST_CASE("general path agrees with the model path under a constant shift") {
    const double c = 3.0;
    auto op = shifted_dirichlet(c);
    for (cplx rho : {cplx{4.0, 0.3}, cplx{9.5, -0.2}}) {
        const cplx rho_model = std::sqrt(rho * rho - c);
        for (double x : {0.15, 0.6})
            for (double xi : {0.3, 0.8}) {
                cplx a = green(op, x, xi, rho);
                cplx b = green(catalog::dirichlet2(), x, xi, rho_model);
                CHECK(testutil::close(a, b, 1e-8 * (1.0 + std::abs(b))));
            }
    }
}

TEST_CASE("model resolvent solves the Dirichlet problem with constant data") {
    auto op = catalog::dirichlet2();
    model::SampledFunction f([](double) { return cplx{1.0}; }, 64);
    RVec grid = uniform_grid(20);
    auto R = make_resolvent(op, f, grid, {30.0, {}});
    for (cplx rho : {cplx{5.0, 0.5}, cplx{25.0, 0.1}, cplx{1.3, -0.7}}) {
        CVec u = R->apply_lambda(rho * rho);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid[i];
            cplx oracle = (std::cos(rho * (x - 0.5)) / std::cos(rho / 2.0) - 1.0) / (rho * rho);
            CHECK(testutil::close(u[i], oracle, 1e-11 * (1.0 + std::abs(oracle))));
        }
    }
}

TEST_CASE("numeric resolvent agrees with the model resolvent") {
    const double c = 1.5;
    auto op = shifted_dirichlet(c);
    model::SampledFunction f([](double x) { return x < 0.4 ? cplx{1.0 + x} : cplx{-0.5}; }, 64, {0.4});
    RVec grid = uniform_grid(16);
    auto Rn = make_resolvent(op, f, grid, {20.0, {}});
    auto Rm = make_resolvent(catalog::dirichlet2(), f, grid, {20.0, {}});
    for (cplx lam : {cplx{30.0, 4.0}, cplx{-10.0, 1.0}, cplx{200.0, -20.0}}) {
        CVec a = Rn->apply_lambda(lam);
        CVec b = Rm->apply_lambda(lam - c);
        CHECK(sup_abs_diff(a, b) < 1e-8 * (1.0 + sup_abs(b)));
    }
}

TEST_CASE("characteristic values of classical problems") {
    SUBCASE("Dirichlet") {
        auto set = find_char_values(catalog::dirichlet2(), 30.0);
        REQUIRE(set.values.size() == 9);
        for (std::size_t j = 0; j < 9; ++j) {
            CHECK(testutil::close(set.values[j].rho, cplx{(j + 1) * kPi}, 1e-9));
            CHECK(set.values[j].multiplicity == 1);
        }
    }
    SUBCASE("Neumann") {
        auto set = find_char_values(catalog::neumann2(), 20.0);
        REQUIRE(set.values.size() == 7);
        CHECK(std::abs(set.values[0].lambda) < 1e-9);
        for (std::size_t j = 1; j < 7; ++j) CHECK(testutil::close(set.values[j].rho, cplx{j * kPi}, 1e-9));
    }
    SUBCASE("periodic double roots") {
        auto set = find_char_values(catalog::periodic2(), 26.0);
        REQUIRE(set.values.size() == 5);
        CHECK(set.values[0].multiplicity == 1);
        for (std::size_t j = 1; j < 5; ++j) {
            CHECK(set.values[j].multiplicity == 2);
            CHECK(testutil::close(set.values[j].rho, cplx{2.0 * kPi * j}, 1e-7));
        }
    }
    SUBCASE("clamped beam") {
        auto set = find_char_values(catalog::clamped4(), 12.0);
        REQUIRE(set.values.size() >= 2);
        CHECK(std::abs(std::abs(set.values[0].rho) - 4.730040744862704) < 1e-8);
        CHECK(std::abs(std::abs(set.values[1].rho) - 7.853204624095838) < 1e-8);
    }
    SUBCASE("linear potential") {
        auto set = find_char_values(catalog::dirichlet2_linear_potential(), 13.0);
        REQUIRE(set.values.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) {
            const double guess = std::pow((j + 1) * kPi, 2) + 0.5;
            const double oracle = shooting_eigenvalue(guess - 2.0, guess + 2.0);
            CHECK(std::abs(set.values[j].lambda - oracle) < 1e-7 * oracle);
        }
    }
}

TEST_CASE("progressions of the Dirichlet problem") {
    auto set = find_char_values(catalog::dirichlet2(), 60.0);
    REQUIRE(set.progressions.size() == 2);
    for (const auto& v : set.values) CHECK(v.fit_residual < 1e-8);
}

TEST_CASE("eta determinant approaches Theta") {
    auto op = catalog::skew2();
    const cplx dir = std::exp(kI * 1.5);
    const double r1 = eta_residual(op, 5.0 * dir), r2 = eta_residual(op, 20.0 * dir);
    CHECK(r2 < r1);
    CHECK(r2 < 1e-6);
}

TEST_CASE("Green function bound in the sector") {
    auto op = catalog::skew2();
    for (double r : {10.0, 40.0})
        for (double phi : {0.6, 1.5, 2.5}) {
            cplx rho = r * std::exp(kI * phi);
            double mx = 0.0;
            for (double x : {0.05, 0.5, 0.95})
                for (double xi : {0.1, 0.5, 0.9}) mx = std::max(mx, std::abs(green(op, x, xi, rho)));
            CHECK(mx * r < 2.0);
        }
}

TEST_CASE("Green function does not depend on the partition") {
    // Crossing the real axis flips the automatic partition for n = 2 and n = 4.
    for (auto op : {catalog::skew2(), catalog::clamped4()})
        for (double re : {5.3, 13.9}) {
            auto P1 = auto_partition(op.n(), cplx{re, 1e-9}), P2 = auto_partition(op.n(), cplx{re, -1e-9});
            CHECK(P1 != P2);
            for (double x : {0.2, 0.7}) {
                cplx a = green(op, x, 0.4, cplx{re, 1e-9}), b = green(op, x, 0.4, cplx{re, -1e-9});
                CHECK(testutil::close(a, b, 1e-7 * (1.0 + std::abs(a))));
            }
        }
}

TEST_CASE("double characteristic values on the real axis") {
    // skew: Delta(rho) is proportional to rho (cos rho - 1), so rho = 2 pi j are double zeros,
    // and lambda = 0 is simple (y = 2 - 3x).
    for (double R : {41.0, 43.0, 57.0}) {
        auto cv = find_char_values(catalog::skew2(), R);
        const int J = static_cast<int>(std::floor(R / (2.0 * kPi)));
        REQUIRE(cv.values.size() == static_cast<std::size_t>(J + 1));
        CHECK(std::abs(cv.values[0].lambda) < 1e-6);
        CHECK(cv.values[0].multiplicity == 1);
        for (int j = 1; j <= J; ++j) {
            CHECK(cv.values[j].multiplicity == 2);
            CHECK(std::abs(cv.values[j].rho - 2.0 * kPi * j) < 1e-6);
        }
    }
}
