#include "test_main.hpp"

#include "equiconv/catalog.hpp"
#include "equiconv/criterion.hpp"
#include "equiconv/errors.hpp"
#include "equiconv/regularity.hpp"

using namespace equiconv;
using namespace equiconv::criterion;

namespace {

model::OperatorSpec random_regular(int n, std::mt19937_64& rng) {
    for (;;) {
        model::OperatorSpec op;
        op.expr.n = n;
        op.bc = catalog::random_bc(n, rng);
        op.label = "random";
        if (regularity::classify(op).verdict == regularity::Verdict::Regular) return op;
    }
}

model::SampledFunction smooth_f0() {
    return model::SampledFunction([](double x) { return cplx{x * (1.0 - x) * (1.0 + 2.0 * x)}; });
}

} // namespace

TEST_CASE("alpha numbers of the classical n=2 problems") {
    const double c = 1.0 / (2.0 * kPi);
    auto d = alpha_numbers(catalog::dirichlet2());
    CHECK(testutil::close(d.Theta, 1.0, 1e-15));
    CHECK(testutil::close(d.d[0][0], catalog::dirichlet2().bc.rows[0].b, 0.0));
    CHECK(testutil::close(d.d[1][0], -catalog::dirichlet2().bc.rows[0].a, 0.0));
    CHECK(testutil::close(d.alpha[0][0], 0.0, 1e-15));
    CHECK(testutil::close(d.alpha[0][1], c, 1e-15));
    CHECK(testutil::close(d.alpha[1][0], c, 1e-15));
    CHECK(testutil::close(d.alpha[1][1], 0.0, 1e-15));
    auto nm = alpha_numbers(catalog::neumann2());
    CHECK(testutil::close(nm.alpha[0][1], -c, 1e-15));
    CHECK(testutil::close(nm.alpha[1][0], -c, 1e-15));
    CHECK(d.laplace_residual < 1e-12);
    CHECK_THROWS_AS(alpha_numbers(catalog::decomposing2()), Error);
}

TEST_CASE("alpha numbers are invariant under row scaling") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto op = random_regular(trial % 2 ? 4 : 2, rng);
        auto base = alpha_numbers(op);
        CHECK(base.laplace_residual < 1e-10);
        auto scaled = op;
        for (auto& row : scaled.bc.rows) {
            const cplx s{g(rng), g(rng)};
            row.a *= s;
            row.b *= s;
        }
        auto t = alpha_numbers(scaled);
        for (std::size_t i = 0; i < base.alpha.size(); ++i)
            for (std::size_t j = 0; j < base.alpha.size(); ++j)
                CHECK(testutil::close(t.alpha[i][j], base.alpha[i][j], 1e-10));
    }
    auto pert = catalog::dirichlet2_linear_potential();
    auto a = alpha_numbers(pert).alpha, b = alpha_numbers(catalog::dirichlet2()).alpha;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(a[i][j] == b[i][j]);
}

TEST_CASE("Phi and Psi") {
    std::mt19937_64 rng(5);
    auto op = random_regular(4, rng);
    auto t = alpha_numbers(op);
    auto f0 = smooth_f0();
    auto pp = phi_psi(f0, t.alpha, 4);
    REQUIRE(pp.Phi.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        cplx want = t.alpha[2][k] * f0.raw(0.3) + t.alpha[0][k] * f0.raw(0.7);
        CHECK(testutil::close(pp.Phi[k].raw(0.3), want, 1e-14));
        cplx wpsi = t.alpha[3][k] * f0.raw(0.3) + t.alpha[1][k] * f0.raw(0.7);
        CHECK(testutil::close(pp.Psi[k].raw(0.3), wpsi, 1e-14));
        CHECK(pp.Phi[k](1.3) == cplx{0.0});
    }
    model::SampledFunction zero;
    auto pz = phi_psi(zero, t.alpha, 4);
    for (const auto& p : pz.Phi) CHECK(sup_abs(p.samples()) == 0.0);
    model::SampledFunction sym([](double x) { return cplx{std::sin(kPi * x)}; });
    auto ps = phi_psi(sym, t.alpha, 4);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(testutil::close(ps.Phi[k].raw(0.21), (t.alpha[2][k] + t.alpha[0][k]) * sym.raw(0.21), 1e-14));
    model::SampledFunction one([](double) { return cplx{1.0}; });
    CHECK_THROWS_AS(phi_psi(one, t.alpha, 4), Error);
}

TEST_CASE("beta numbers and nondegeneracy") {
    auto d = catalog::dirichlet2(), nm = catalog::neumann2();
    auto z = beta_numbers(d, d);
    for (const auto& row : z)
        for (const auto& v : row) CHECK(v == cplx{0.0});
    auto b1 = beta_numbers(d, nm), b2 = beta_numbers(nm, d);
    double mx = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(b1[i][j] == -b2[i][j]);
            mx = std::max(mx, std::abs(b1[i][j]));
        }
    CHECK(testutil::close(b1[0][1], 1.0 / kPi, 1e-15));
    CHECK(mx > 0.1);
    CHECK_THROWS_AS(beta_numbers(d, catalog::clamped4()), Error);

    auto f0 = smooth_f0();
    auto nd = nondegeneracy(alpha_numbers(d).alpha, 2, f0);
    CHECK(nd.base_rank == 2);
    CHECK(nd.span_ok);
    CHECK(std::abs(nd.det1) > 1e-3);
    auto nz = nondegeneracy(z, 2, f0);
    CHECK(nz.det1 == cplx{0.0});
    CHECK(nz.det2 == cplx{0.0});
    CHECK_FALSE(nz.span_ok);
    model::SampledFunction sym([](double x) { return cplx{std::sin(kPi * x)}; });
    auto ns = nondegeneracy(alpha_numbers(d).alpha, 2, sym);
    CHECK(ns.base_rank == 1);
    CHECK(ns.span_ok);
}

TEST_CASE("singular integrals I_r") {
    RVec x = uniform_grid(20);
    model::SampledFunction zero;
    CHECK(sup_abs(I_r(zero, 50.0, 1, x)) == 0.0);
    auto f0 = catalog::whole_interval_f0();
    auto g = model::SampledFunction([](double s) { return cplx{s >= 0.2 && s <= 0.8 ? 1.0 + s : 0.0, 0.0}; }, 400,
                                    {0.2, 0.8});
    auto p = I_r(g, 80.0, 1, x), m = I_r(g, 80.0, -1, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(testutil::close(m[i], std::conj(p[i]), 1e-12));
    // Independent oracle at x = 0.5 by fine Simpson on the support.
    const double r = 100.0;
    auto v = I_r(f0, r, 1, {0.5});
    const int M = 200000;
    const double h = 0.6 / M;
    cplx s{0.0};
    for (int i = 0; i <= M; ++i) {
        const double xi = 0.2 + i * h;
        const double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::exp(kI * r * xi) * (1.0 + xi) / (0.5 + xi);
    }
    s *= h / 3.0;
    CHECK(testutil::close(v[0], s, 1e-9));
    auto lin = I_r(model::scaled(2.0, f0), 60.0, 1, x), one = I_r(f0, 60.0, 1, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(testutil::close(lin[i], 2.0 * one[i], 1e-12));
}

TEST_CASE("order-two identity residual decreases") {
    IdentityOptions o;
    o.grid = uniform_grid(40);
    auto f = smooth_f0();
    for (auto op : {catalog::dirichlet2(), catalog::skew2()}) {
        const double r5 = 2.0 * kPi * 5 + kPi / 2, r15 = 2.0 * kPi * 15 + kPi / 2;
        const double a = second_order_identity_residual(op, f, r5, o);
        const double b = second_order_identity_residual(op, f, r15, o);
        CHECK_MESSAGE(b < a / 2.0, op.label << " " << a << " " << b);
        IdentityOptions printed = o;
        printed.printed_sign = true;
        CHECK(second_order_identity_residual(op, f, r15, printed) > 10.0 * b);
    }
    model::SampledFunction zero;
    CHECK(second_order_identity_residual(catalog::dirichlet2(), zero, 20.0, o) < 1e-12);
    model::SampledFunction one([](double) { return cplx{1.0}; });
    CHECK_THROWS_AS(second_order_identity_residual(catalog::dirichlet2(), one, 20.0, o), Error);
}

TEST_CASE("odd-order reduction") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto op = random_regular(3, rng);
        auto red = odd_reduction(op);
        CHECK(red.parity_max < 1e-10);
        CHECK_MESSAGE(red.discrepancy <= 1e-8, red.convention.describe());
        CHECK(red.convention.delta == "exp(2 pi i chi/m)");
        CHECK_FALSE(red.convention.ratio_printed);
        CHECK_FALSE(red.convention.roots_printed);
    }
    CHECK_THROWS_AS(odd_reduction(catalog::dirichlet2()), Error);
}

TEST_CASE("whole-interval report edge cases") {
    auto sched = expansion::choose_radii(std::vector<model::OperatorSpec>{catalog::dirichlet2()}, 2, 4);
    ReportOptions o;
    o.grid = uniform_grid(20);
    model::SampledFunction zero;
    auto rep = whole_interval_report({catalog::dirichlet2()}, zero, sched, o);
    CHECK(rep.verdict == Verdict::ConsistentWithEquiconvergence);
    for (const auto& c : rep.curves)
        for (double v : c.values) CHECK(v == 0.0);
    auto f = smooth_f0();
    auto pair = whole_interval_report({catalog::skew2(), catalog::skew2()}, f, sched, o);
    CHECK(pair.mode == "pair-op");
    for (double v : pair.curves.back().values) CHECK(v <= 2e-10);
    CHECK_FALSE(pair.nondeg.span_ok);
    CHECK(pair.verdict == Verdict::ConsistentWithEquiconvergence);
    model::SampledFunction one([](double) { return cplx{1.0}; });
    CHECK_THROWS_AS(whole_interval_report({catalog::dirichlet2()}, one, sched, o), Error);
}
