#include "test_main.hpp"

#include <cmath>

#include "equiconv/errors.hpp"
#include "equiconv/model.hpp"

using namespace equiconv;
using namespace equiconv::model;

namespace {

RawForm form2(cplx a0, cplx a1, cplx b0, cplx b1) { return {{a0, a1}, {b0, b1}}; }

// Residual of projecting a raw form onto the span of the normalized rows.
double span_residual(const std::vector<RawForm>& forms, const NormalizedBoundaryConditions& bc) {
    auto rows = to_raw_forms(bc);
    const std::size_t n = rows.size();
    double worst = 0.0;
    for (const auto& f : forms) {
        // Least squares over 2n unknown coordinates via normal equations.
        std::vector<CVec> G(n, CVec(n));
        CVec rhs(n);
        auto dot = [&](const RawForm& u, const RawForm& v) {
            cplx s{0.0};
            for (std::size_t j = 0; j < n; ++j) s += std::conj(u.at0[j]) * v.at0[j] + std::conj(u.at1[j]) * v.at1[j];
            return s;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) G[i][j] = dot(rows[i], rows[j]);
            rhs[i] = dot(rows[i], f);
        }
        // Gaussian elimination on the small Gram system.
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::abs(G[r][c]) > std::abs(G[p][c])) p = r;
            std::swap(G[c], G[p]);
            std::swap(rhs[c], rhs[p]);
            for (std::size_t r = c + 1; r < n; ++r) {
                cplx m = G[r][c] / G[c][c];
                for (std::size_t k = c; k < n; ++k) G[r][k] -= m * G[c][k];
                rhs[r] -= m * rhs[c];
            }
        }
        CVec x(n);
        for (std::size_t c = n; c-- > 0;) {
            cplx s = rhs[c];
            for (std::size_t k = c + 1; k < n; ++k) s -= G[c][k] * x[k];
            x[c] = s / G[c][c];
        }
        for (std::size_t j = 0; j < n; ++j) {
            cplx r0 = f.at0[j], r1 = f.at1[j];
            for (std::size_t i = 0; i < n; ++i) {
                r0 -= x[i] * rows[i].at0[j];
                r1 -= x[i] * rows[i].at1[j];
            }
            worst = std::max(worst, std::abs(r0) + std::abs(r1));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("normalize_bc canonical Dirichlet forms") {
    auto bc = normalize_bc({form2(1, 0, 0, 0), form2(0, 0, 1, 0)});
    REQUIRE(bc.n() == 2);
    CHECK(bc.rows[0].sigma == 0);
    CHECK(bc.rows[0].a == cplx{1.0});
    CHECK(bc.rows[0].b == cplx{0.0});
    CHECK(bc.rows[1].a == cplx{0.0});
    CHECK(bc.rows[1].b == cplx{1.0});
}

TEST_CASE("normalize_bc reduces sum and difference to the canonical pair") {
    auto bc = normalize_bc({form2(1, 0, 1, 0), form2(1, 0, -1, 0)});
    CHECK(bc.rows[0].a == cplx{1.0});
    CHECK(bc.rows[0].b == cplx{0.0});
    CHECK(bc.rows[1].a == cplx{0.0});
    CHECK(bc.rows[1].b == cplx{1.0});
}

TEST_CASE("normalize_bc rejects dependent forms") {
    try {
        normalize_bc({form2(1, 0, 0, 0), form2(1, 0, 0, 0)});
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == "RankDeficient");
    }
}

TEST_CASE("normalize_bc is idempotent and preserves the span") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 3;
        std::vector<RawForm> forms;
        for (int i = 0; i < n; ++i) {
            RawForm f{CVec(static_cast<std::size_t>(n)), CVec(static_cast<std::size_t>(n))};
            for (int j = 0; j < n; ++j) {
                // Sparse random entries produce varied order patterns.
                if (g(rng) > 0.3) f.at0[static_cast<std::size_t>(j)] = cplx{g(rng), g(rng)};
                if (g(rng) > 0.3) f.at1[static_cast<std::size_t>(j)] = cplx{g(rng), g(rng)};
            }
            forms.push_back(f);
        }
        NormalizedBoundaryConditions bc;
        try {
            bc = normalize_bc(forms);
        } catch (const Error& e) {
            CHECK(e.code() == "RankDeficient");
            continue;
        }
        CHECK_NOTHROW(bc.validate());
        CHECK(span_residual(forms, bc) < 1e-9);
        auto again = normalize_bc(to_raw_forms(bc));
        REQUIRE(again.n() == bc.n());
        for (int i = 0; i < bc.n(); ++i) {
            const auto& u = bc.rows[static_cast<std::size_t>(i)];
            const auto& v = again.rows[static_cast<std::size_t>(i)];
            CHECK(u.sigma == v.sigma);
            CHECK(std::abs(u.a - v.a) < 1e-14);
            CHECK(std::abs(u.b - v.b) < 1e-14);
            CHECK(u.lower.size() == v.lower.size());
        }
    }
}

TEST_CASE("reflect") {
    SampledFunction one([](double) { return cplx{1.0}; });
    for (auto v : reflect(one).samples()) CHECK(v == cplx{1.0});
    SampledFunction id([](double x) { return cplx{x}; });
    auto r = reflect(id);
    CHECK(std::abs(r(0.25) - 0.75) < 1e-15);
    auto rr = reflect(r);
    for (std::size_t i = 0; i <= id.N(); ++i) CHECK(rr.samples()[i] == id.samples()[i]);
}

TEST_CASE("extend_tilde") {
    SampledFunction c([](double) { return cplx{3.0}; });
    auto ct = extend_tilde(c);
    CHECK(ct(-5.0) == cplx{3.0});
    CHECK(ct(7.0) == cplx{3.0});
    SampledFunction id([](double x) { return cplx{x}; });
    auto t = extend_tilde(id);
    CHECK(t(-1.0) == cplx{0.0});
    CHECK(t(2.0) == cplx{1.0});
    for (double x : {0.0, 0.3, 1.0}) CHECK(t(x) == id(x));
}

TEST_CASE("split_endpoint") {
    SampledFunction id([](double x) { return cplx{x}; });
    auto s = split_endpoint(id);
    CHECK(sup_abs(s.f0.samples()) < 1e-15);
    SampledFunction sn([](double x) { return cplx{std::sin(kPi * x)}; });
    auto s2 = split_endpoint(sn);
    CHECK(std::abs(s2.P(0.4)) < 1e-15);
    SampledFunction q([](double x) { return cplx{1.0 + x * x}; });
    auto s3 = split_endpoint(q);
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        CHECK(std::abs(s3.P(x) - (1.0 + x)) < 1e-14);
        CHECK(std::abs(s3.f0(x) - (x * x - x)) < 1e-14);
    }
    CHECK(std::abs(s3.f0(0.0)) + std::abs(s3.f0(1.0)) < 1e-12);
    for (std::size_t i = 0; i <= q.N(); ++i)
        CHECK(std::abs(s3.f0.samples()[i] + s3.P.samples()[i] - q.samples()[i]) < 1e-14);
}

TEST_CASE("eliminate_subleading") {
    DifferentialExpression e;
    e.n = 2;
    auto r0 = eliminate_subleading(e);
    CHECK(std::abs(r0.V(0.7) - 1.0) < 1e-15);

    const cplx c{0.7, -0.3};
    e.coefficients[1] = CoefficientDescriptor::polynomial({c});
    auto r = eliminate_subleading(e);
    for (double x : {0.0, 0.3, 1.0}) CHECK(std::abs(r.V(x) - std::exp(-kI * c * x / 2.0)) < 1e-14);
    CHECK(r.V(0.0) == cplx{1.0});
    CHECK(r.expr.coefficients.count(1) == 0);

    // Oracle: apply l to V z by finite differences and compare with V l'(z).
    DifferentialExpression e3;
    e3.n = 3;
    e3.coefficients[2] = CoefficientDescriptor::polynomial({0.4, cplx{0.0, 0.5}});
    e3.coefficients[0] = CoefficientDescriptor::polynomial({1.0, 0.0, 2.0});
    auto r3 = eliminate_subleading(e3);
    auto z = [](double x) { return std::exp(cplx{0.3, 0.8} * x); };
    auto Dz = [](int k, double x) { return std::pow(-kI * cplx{0.3, 0.8}, k) * std::exp(cplx{0.3, 0.8} * x); };
    auto y = [&](double x) { return r3.V(x) * z(x); };
    // D^k y by central differences of step h.
    auto Dk = [&](int k, double x) {
        const double h = 1e-3;
        cplx d;
        if (k == 0) d = y(x);
        if (k == 1) d = (y(x + h) - y(x - h)) / (2 * h);
        if (k == 2) d = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
        if (k == 3) d = (y(x + 2 * h) - 2.0 * y(x + h) + 2.0 * y(x - h) - y(x - 2 * h)) / (2 * h * h * h);
        return std::pow(-kI, k) * d;
    };
    for (double x : {0.25, 0.5, 0.75}) {
        cplx lhs = Dk(3, x) + e3.p(2, x) * Dk(2, x) + e3.p(0, x) * Dk(0, x);
        cplx rhs = Dz(3, x);
        for (int m = 0; m <= 1; ++m) rhs += r3.expr.p(m, x) * Dz(m, x);
        CHECK(std::abs(lhs - r3.V(x) * rhs) < 1e-4);
    }

    DifferentialExpression bad;
    bad.n = 2;
    bad.coefficients[1] = CoefficientDescriptor::polynomial({1.0}, false);
    try {
        eliminate_subleading(bad);
        FAIL("expected NotSmooth");
    } catch (const Error& err) {
        CHECK(err.code() == "NotSmooth");
    }
}

TEST_CASE("quad examples and linearity") {
    CHECK(std::abs(quad([](double) { return cplx{1.0}; }, 0, 1, 0) - 1.0) < 1e-12);
    cplx expect = (std::exp(kI * 50.0) - 1.0) / (kI * 50.0);
    CHECK(std::abs(quad([](double x) { return std::exp(kI * 50.0 * x); }, 0, 1, 50, 1e-12) - expect) < 1e-10);
    CHECK(std::abs(quad([](double x) { return cplx{x}; }, 0, 1, 0) - 0.5) < 1e-12);
    CHECK(std::abs(quad([](double x) { return cplx{x < 0.3 ? 1.0 : 0.0}; }, 0, 1, 0, 1e-12, {0.3}) - 0.3) < 1e-12);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
        CVec p(6), q(6);
        for (auto& c : p) c = {g(rng), g(rng)};
        for (auto& c : q) c = {g(rng), g(rng)};
        cplx al{g(rng), g(rng)}, be{g(rng), g(rng)};
        auto ev = [](const CVec& c, double x) {
            cplx s{0.0};
            for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
            return s;
        };
        cplx lhs = quad([&](double x) { return al * ev(p, x) + be * ev(q, x); }, 0, 1, 0);
        cplx rhs = al * quad([&](double x) { return ev(p, x); }, 0, 1, 0) + be * quad([&](double x) { return ev(q, x); }, 0, 1, 0);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("quad reports non-convergence") {
    try {
        quad([](double x) { return cplx{1.0 / std::sqrt(std::abs(x - 0.123456))}; }, 0, 1, 0, 1e-15);
        FAIL("expected ToleranceNotMet");
    } catch (const Error& e) {
        CHECK(e.code() == "ToleranceNotMet");
    }
}

TEST_CASE("spectral point branch rules") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 1e4);
    for (int n : {2, 3, 4, 5}) {
        for (int t = 0; t < 100; ++t) {
            cplx lambda = std::polar(u(rng), 0.3);
            auto sp = spectral_point(lambda, n);
            CHECK(std::abs(std::pow(sp.rho, n) - lambda) <= 1e-12 * std::abs(lambda));
            double a = std::arg(sp.rho);
            if (n % 2 == 0) {
                CHECK(a >= 0.0);
                CHECK(a <= 2 * kPi / n + 1e-14);
            } else {
                CHECK(std::abs(a) <= kPi / (2 * n) + 1e-14);
                CHECK(sp.sector == Sector::S1);
            }
        }
    }
    auto neg = spectral_point(cplx{-8.0, -1e-9}, 3);
    CHECK(std::abs(std::pow(neg.rho, 3) - cplx{-8.0, -1e-9}) < 1e-10);
    CHECK(neg.sector == Sector::S2);
}
