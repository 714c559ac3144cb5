#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace equiconv {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Uniform grid of N+1 points on [a, b].
inline RVec uniform_grid(std::size_t N, double a = 0.0, double b = 1.0) {
    RVec x(N + 1);
    for (std::size_t i = 0; i <= N; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(N);
    x[N] = b;
    return x;
}

inline double sup_abs(const CVec& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

inline double sup_abs_diff(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace equiconv
