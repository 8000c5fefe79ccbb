#include "gmanova/linalg.hpp"

#include <string>

#include "gmanova/error.hpp"

namespace gmanova {

bool all_finite(const Matrix& m) { return m.allFinite(); }

Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = kRankTolerance * s(0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return rank;
}

void symmetrize(Matrix& m) {
  Matrix t = m.transpose();
  m = (0.5 * (m + t)).eval();
}

Matrix projector(const Matrix& m) {
  if (!m.allFinite()) throw Error(ErrorKind::input, "projector input has non-finite entries");
  const Index n = m.rows();
  if (m.cols() == 0) return Matrix::Zero(n, n);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return Matrix::Zero(n, n);
  const double cutoff = kRankTolerance * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;

  const auto basis = svd.matrixU().leftCols(rank);
  Matrix p = basis * basis.transpose();
  symmetrize(p);
  return p;
}

Matrix hadamard_square(const Matrix& m) { return m.array().square().matrix(); }

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> checked_eigen(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw Error(ErrorKind::design, std::string(what) + " has non-finite entries");
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::design, std::string(what) + " must be a non-empty square matrix");
  Matrix sym = m;
  symmetrize(sym);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::design, std::string(what) + ": eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= kEigenFloor * top)
    throw Error(ErrorKind::design, std::string(what) + " is not numerically positive definite");
  return eig;
}

}  // namespace

Matrix inverse_spd(const Matrix& m, const char* what) {
  auto eig = checked_eigen(m, what);
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * eig.eigenvalues().cwiseInverse().asDiagonal() * v.transpose();
  symmetrize(out);
  return out;
}

Matrix sqrt_spd(const Matrix& m, const char* what) {
  auto eig = checked_eigen(m, what);
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
  symmetrize(out);
  return out;
}

Matrix inverse_sqrt_spd(const Matrix& m, const char* what) {
  auto eig = checked_eigen(m, what);
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  symmetrize(out);
  return out;
}

}  // namespace gmanova
