#pragma once

#include <Eigen/Dense>

namespace gmanova {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative singular-value threshold used for every numerical rank decision.
inline constexpr double kRankTolerance = 1e-10;

/// Eigenvalue floor (relative to the largest eigenvalue) for symmetric
/// square roots and inverse square roots.
inline constexpr double kEigenFloor = 1e-12;

bool all_finite(const Matrix& m);

/// Number of singular values above kRankTolerance * sigma_max.
Index numerical_rank(const Matrix& m);

/// Orthogonal projector onto the column space of `m`, i.e. M (M'M)^+ M'.
/// Rank-deficient input is allowed. The result is exactly symmetric.
/// Throws ErrorKind::input on non-finite entries.
Matrix projector(const Matrix& m);

/// Replace `m` by (m + m') / 2 so that m(i, j) == m(j, i) bitwise.
void symmetrize(Matrix& m);

/// Elementwise square, (M ⊙ M).
Matrix hadamard_square(const Matrix& m);

/// Inverse of a symmetric positive definite matrix. Throws ErrorKind::design
/// naming `what` if the matrix is not numerically positive definite.
Matrix inverse_spd(const Matrix& m, const char* what);

/// Symmetric square root and inverse square root through the symmetric
/// eigendecomposition. Eigenvalues at or below kEigenFloor * lambda_max make
/// the matrix "not positive definite" and raise ErrorKind::design.
Matrix sqrt_spd(const Matrix& m, const char* what);
Matrix inverse_sqrt_spd(const Matrix& m, const char* what);

/// tr(A B) for symmetric A, B without forming the product.
inline double trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace gmanova
