#pragma once

#include <vector>

#include "equiconv/types.hpp"

namespace equiconv::linalg {

using CMat = std::vector<CVec>;  // row-major, square

cplx det(const CMat& m);
// Solves m x = rhs.
CVec solve(const CMat& m, const CVec& rhs);
// Solves m^T x = rhs.
CVec solve_transpose(const CMat& m, const CVec& rhs);
// Cofactor matrix C with C[i][j] = (-1)^{i+j} minor(i,j).
CMat cofactors(const CMat& m);

} // namespace equiconv::linalg
