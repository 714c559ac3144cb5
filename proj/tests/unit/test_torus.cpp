#include "test_main.hpp"

#include "equiconv/torus.hpp"

using namespace equiconv;
using namespace equiconv::torus;

namespace {

CoefficientSequence random_sequence(int M, std::mt19937_64& rng, Kind kind = Kind::Pseudofunction) {
    std::normal_distribution<double> g(0.0, 1.0);
    CoefficientSequence s(M, kind);
    for (auto& v : s.c) v = cplx{g(rng), g(rng)};
    return s;
}

} // namespace

TEST_CASE("partial sums and norms") {
    auto F = CoefficientSequence::single_mode(3, 2.0, 8);
    auto n = norms(F);
    CHECK(n.a_norm == 2.0);
    CHECK(n.pf_norm == 2.0);
    CHECK(n.derivative_a_norm == 6.0);
    CoefficientSequence ones(16);
    for (auto& v : ones.c) v = 1.0;
    CHECK(norms(ones).pf_norm == 1.0);
    CHECK(norms(ones).a_norm == 33.0);
    auto z = norms(CoefficientSequence(5));
    CHECK(z.a_norm == 0.0);
    CHECK(z.pf_norm == 0.0);
    CHECK(z.derivative_a_norm == 0.0);

    std::mt19937_64 rng(1);
    auto R = random_sequence(10, rng);
    R.at(0) = 0.0;
    CHECK(norms(pf_partial_sum(R, 5.0)).a_norm == 0.0);
    CHECK(pf_partial_sum(R, 2.0 * kPi * 10).c == R.c);
    auto S = pf_partial_sum(R, 2.0 * kPi * 4.5);
    CHECK(pf_partial_sum(S, 2.0 * kPi * 4.5).c == S.c);
    CHECK(S[4] == R[4]);
    CHECK(S[5] == cplx{0.0});
    CHECK(pf_partial_sum(R, 2.0 * kPi * 3)[-3] == R[-3]);
}

TEST_CASE("products match pointwise multiplication") {
    std::mt19937_64 rng(2);
    auto a = random_sequence(6, rng), b = random_sequence(9, rng);
    auto p = multiply(a, b);
    for (double x : {0.0, 0.7, 2.9, 5.5}) CHECK(testutil::close(evaluate(p, x), evaluate(a, x) * evaluate(b, x), 1e-12));
}

TEST_CASE("commutator examples") {
    std::mt19937_64 rng(3);
    auto F = random_sequence(12, rng);
    auto c = CoefficientSequence::single_mode(0, cplx{1.3, -0.4}, 3, Kind::SmoothMultiplier);
    CHECK(norms(commutator(F, c, 2.0 * kPi * 5)).a_norm == 0.0);
    // Single modes: gamma S_r F = gamma F, so the commutator is -gamma F when l0 + p leaves the window.
    const double r = 2.0 * kPi * 6;
    for (int l0 = -6; l0 <= 6; ++l0)
        for (int p = -4; p <= 4; ++p) {
            auto f = CoefficientSequence::single_mode(l0, 1.0, 8);
            auto g = CoefficientSequence::single_mode(p, 1.0, 4, Kind::SmoothMultiplier);
            const double a = norms(commutator(f, g, r)).a_norm;
            if (std::abs(l0 + p) > 6)
                CHECK(testutil::close(a, 1.0 / std::sqrt(2.0 * kPi), 1e-15));
            else
                CHECK(a == 0.0);
        }
}

TEST_CASE("commutator bound on random trials") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> mf(1, 40), mg(0, 12);
    std::uniform_real_distribution<double> rr(0.0, 2.0 * kPi * 45);
    double worst = -1e300;
    for (int trial = 0; trial < 1000; ++trial) {
        auto F = random_sequence(mf(rng), rng);
        auto g = random_sequence(mg(rng), rng, Kind::SmoothMultiplier);
        const double r = rr(rng);
        const double lhs = norms(commutator(F, g, r, Exec::Serial)).a_norm;
        const double rhs = norms(g).derivative_a_norm * norms(F).pf_norm;
        CHECK(lhs <= rhs + 1e-12 * (1.0 + rhs));
        worst = std::max(worst, lhs / (rhs + 1e-300));
    }
    MESSAGE("largest ratio " << worst);
}

TEST_CASE("commutator is bilinear") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto F1 = random_sequence(10, rng), F2 = random_sequence(10, rng);
        auto g1 = random_sequence(4, rng), g2 = random_sequence(4, rng);
        const cplx a{0.3, -1.2}, b{2.0, 0.5};
        const double r = 2.0 * kPi * 7;
        CoefficientSequence Fs(10), gs(4);
        for (std::size_t i = 0; i < Fs.c.size(); ++i) Fs.c[i] = a * F1.c[i] + b * F2.c[i];
        for (std::size_t i = 0; i < gs.c.size(); ++i) gs.c[i] = a * g1.c[i] + b * g2.c[i];
        auto lhsF = commutator(Fs, g1, r), c1 = commutator(F1, g1, r), c2 = commutator(F2, g1, r);
        auto lhsg = commutator(F1, gs, r), d1 = commutator(F1, g1, r), d2 = commutator(F1, g2, r);
        for (std::size_t i = 0; i < lhsF.c.size(); ++i) {
            CHECK(testutil::close(lhsF.c[i], a * c1.c[i] + b * c2.c[i], 1e-12));
            CHECK(testutil::close(lhsg.c[i], a * d1.c[i] + b * d2.c[i], 1e-12));
        }
    }
}

TEST_CASE("spike and cutoff coefficients") {
    // Independent oracle: Simpson in the variable u with x = x0 + u^2 on a fine grid.
    const double x0 = kPi, w = 0.1;
    auto F = spike(x0, 64, w);
    for (int l : {0, 1, -7, 40, 64}) {
        const int m = 40000;
        const double h = std::sqrt(w) / m;
        cplx s{0.0};
        for (int i = 0; i <= m; ++i) {
            const double u = i * h;
            const double wt = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double bump = std::pow(std::cos(kPi * u * u / (2.0 * w)), 2);
            s += wt * 2.0 * bump * (std::exp(-kI * double(l) * (x0 + u * u)) + std::exp(-kI * double(l) * (x0 - u * u)));
        }
        s *= h / 3.0 / std::sqrt(2.0 * kPi);
        CHECK(testutil::close(F[l], s, 1e-10));
    }
    auto g = raised_cosine_cutoff(x0);
    CHECK(g.kind == Kind::SmoothMultiplier);
    for (double d : {0.0, 0.05, -0.1}) CHECK(std::abs(evaluate(g, x0 + d)) < 1e-3);
    CHECK(std::abs(evaluate(g, 0.5) - 1.0) < 1e-3);
    CHECK(std::abs(evaluate(g, x0 - 0.2) - 1.0) < 1e-3);
    CHECK(std::abs(evaluate(g, x0 + 0.15) - 0.5) < 1e-3);
}

TEST_CASE("localization bound") {
    auto gamma = raised_cosine_cutoff(kPi);
    CHECK(localization_bound(CoefficientSequence(64), gamma, 100.0) == 0.0);
    auto F = spike(kPi, 128);
    auto one = CoefficientSequence::single_mode(0, std::sqrt(2.0 * kPi), 0, Kind::SmoothMultiplier);
    CHECK(testutil::close(localization_bound(F, one, 2.0 * kPi * 20), norms(pf_partial_sum(F, 2.0 * kPi * 20)).a_norm,
                          1e-12));
    auto g3 = gamma;
    for (auto& v : g3.c) v *= cplx{0.0, -3.0};
    const double b = localization_bound(F, gamma, 2.0 * kPi * 20);
    CHECK(testutil::close(localization_bound(F, g3, 2.0 * kPi * 20), 3.0 * b, 1e-12 * b));
    auto rows = localization_demo();
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].bound < rows[i - 1].bound);
        CHECK(rows[i].a_norm > rows[i - 1].a_norm);
    }
    auto pm = point_mass(kPi, 16);
    CHECK(testutil::close(norms(pm).pf_norm, 1.0 / std::sqrt(2.0 * kPi), 1e-15));
    auto serial = localization_demo({}, 512, Exec::Serial);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(serial[i].bound == rows[i].bound);
}
