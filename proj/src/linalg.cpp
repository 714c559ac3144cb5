#include "equiconv/linalg.hpp"

#include <Eigen/Dense>

namespace equiconv::linalg {

namespace {

Eigen::MatrixXcd to_eigen(const CMat& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd e(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return e;
}

CVec to_vec(const Eigen::VectorXcd& v) { return CVec(v.data(), v.data() + v.size()); }

} // namespace

cplx det(const CMat& m) {
    if (m.empty()) return 1.0;
    return to_eigen(m).partialPivLu().determinant();
}

CVec solve(const CMat& m, const CVec& rhs) {
    Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    return to_vec(to_eigen(m).partialPivLu().solve(b));
}

CVec solve_transpose(const CMat& m, const CVec& rhs) {
    Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::MatrixXcd t = to_eigen(m).transpose();
    return to_vec(t.partialPivLu().solve(b));
}

CMat cofactors(const CMat& m) {
    const std::size_t n = m.size();
    CMat c(n, CVec(n, cplx{0.0}));
    if (n == 1) {
        c[0][0] = 1.0;
        return c;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CMat minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                CVec row;
                for (std::size_t s = 0; s < n; ++s)
                    if (s != j) row.push_back(m[r][s]);
                minor.push_back(std::move(row));
            }
            c[i][j] = ((i + j) % 2 == 0 ? 1.0 : -1.0) * det(minor);
        }
    return c;
}

} // namespace equiconv::linalg
