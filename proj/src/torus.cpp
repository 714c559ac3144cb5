#include "equiconv/torus.hpp"

#include <cmath>

#include "equiconv/model.hpp"

namespace equiconv::torus {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

int cutoff_index(double r) { return static_cast<int>(std::floor(r / (2.0 * kPi) + 1e-12)); }

} // namespace

CoefficientSequence::CoefficientSequence(int M_, Kind kind_)
    : M(M_), c(static_cast<std::size_t>(2 * M_ + 1), cplx{0.0}), kind(kind_) {}

cplx& CoefficientSequence::at(int l) { return c.at(static_cast<std::size_t>(l + M)); }

CoefficientSequence CoefficientSequence::single_mode(int l, cplx value, int M, Kind kind) {
    CoefficientSequence s(M, kind);
    s.at(l) = value;
    return s;
}

CoefficientSequence pf_partial_sum(const CoefficientSequence& F, double r) {
    CoefficientSequence out(F.M, F.kind);
    const int L = cutoff_index(r);
    for (int l = -F.M; l <= F.M; ++l)
        if (std::abs(l) <= L) out.at(l) = F[l];
    return out;
}

Norms norms(const CoefficientSequence& s) {
    Norms n;
    for (int l = -s.M; l <= s.M; ++l) {
        const double a = std::abs(s[l]);
        n.a_norm += a;
        n.pf_norm = std::max(n.pf_norm, a);
        n.derivative_a_norm += std::abs(l) * a;
    }
    return n;
}

CoefficientSequence multiply(const CoefficientSequence& gamma, const CoefficientSequence& F, Exec exec) {
    CoefficientSequence out(gamma.M + F.M, F.kind);
    for_each_index(out.c.size(), exec, [&](std::size_t i) {
        const int l = static_cast<int>(i) - out.M;
        cplx s{0.0};
        for (int p = std::max(-gamma.M, l - F.M); p <= std::min(gamma.M, l + F.M); ++p) s += gamma[p] * F[l - p];
        out.c[i] = kInvSqrt2Pi * s;
    });
    return out;
}

CoefficientSequence commutator(const CoefficientSequence& F, const CoefficientSequence& gamma, double r, Exec exec) {
    auto a = pf_partial_sum(multiply(gamma, F, exec), r);
    auto b = multiply(gamma, pf_partial_sum(F, r), exec);
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}

double localization_bound(const CoefficientSequence& F, const CoefficientSequence& gamma_K, double r, Exec exec) {
    return norms(multiply(gamma_K, pf_partial_sum(F, r), exec)).a_norm;
}

cplx evaluate(const CoefficientSequence& s, double x) {
    cplx v{0.0};
    for (int l = -s.M; l <= s.M; ++l) v += s[l] * std::exp(kI * static_cast<double>(l) * x);
    return kInvSqrt2Pi * v;
}

CoefficientSequence point_mass(double x0, int M) {
    CoefficientSequence s(M);
    for (int l = -M; l <= M; ++l) s.at(l) = kInvSqrt2Pi * std::exp(-kI * static_cast<double>(l) * x0);
    return s;
}

CoefficientSequence spike(double x0, int M, double w) {
    // Substituting x = x0 +- u^2 removes the square-root singularity.
    CoefficientSequence s(M);
    const double umax = std::sqrt(w);
    for_each_index(s.c.size(), Exec::Parallel, [&](std::size_t i) {
        const double l = static_cast<double>(static_cast<int>(i) - M);
        auto g = [&](double u) {
            const double bump = std::pow(std::cos(kPi * u * u / (2.0 * w)), 2);
            return 2.0 * bump * 2.0 * std::cos(l * u * u) * std::exp(-kI * l * x0);
        };
        s.c[i] = kInvSqrt2Pi * model::quad(g, 0.0, umax, std::abs(l) * umax, 1e-13);
    });
    return s;
}

CoefficientSequence raised_cosine_cutoff(double x0, double inner, double outer, int M) {
    // gamma = 1 - b with b the bump; b^(l) is integrated on its support around x0.
    CoefficientSequence s(M, Kind::SmoothMultiplier);
    auto bump = [&](double d) {
        d = std::abs(d);
        if (d <= inner) return 1.0;
        if (d >= outer) return 0.0;
        return 0.5 * (1.0 + std::cos(kPi * (d - inner) / (outer - inner)));
    };
    for (int l = -M; l <= M; ++l) {
        auto g = [&](double d) { return bump(d) * std::exp(-kI * static_cast<double>(l) * (x0 + d)); };
        const cplx b = model::quad(g, -outer, outer, std::abs(l) + 1.0, 1e-14, {-inner, inner});
        s.at(l) = (l == 0 ? std::sqrt(2.0 * kPi) : 0.0) - kInvSqrt2Pi * b;
    }
    return s;
}

std::vector<LocalizationRow> localization_demo(const RVec& radii, int M, Exec exec) {
    RVec rs = radii;
    if (rs.empty())
        for (double k : {10.0, 20.0, 40.0, 80.0}) rs.push_back(2.0 * kPi * k);
    const auto F = spike(kPi, M);
    const auto gamma = raised_cosine_cutoff(kPi);
    std::vector<LocalizationRow> rows;
    for (double r : rs) {
        const auto Sr = pf_partial_sum(F, r);
        const auto n = norms(Sr);
        rows.push_back({r, localization_bound(F, gamma, r, exec), n.a_norm, n.pf_norm});
    }
    return rows;
}

} // namespace equiconv::torus
