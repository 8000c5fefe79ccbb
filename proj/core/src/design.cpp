#include "gmanova/design.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gmanova/error.hpp"

namespace gmanova {

std::vector<Index> DesignSpec::group_offsets() const {
  std::vector<Index> offsets(group_sizes.size(), 0);
  for (std::size_t i = 1; i < group_sizes.size(); ++i)
    offsets[i] = offsets[i - 1] + group_sizes[i - 1];
  return offsets;
}

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_full_rank(const Matrix& m, Index expected, const char* name) {
  const Index rank = numerical_rank(m);
  if (rank != expected)
    throw Error(ErrorKind::design, std::string(name) + " (" + dims(m) + ") has numerical rank " +
                                       std::to_string(rank) + ", expected " +
                                       std::to_string(expected));
}

}  // namespace

void validate_design(const DesignSpec& d) {
  const Matrix* named[] = {&d.between, &d.within, &d.row_contrast, &d.column_contrast};
  const char* names[] = {"A", "B", "L", "R"};
  for (int i = 0; i < 4; ++i) {
    if (named[i]->size() == 0) throw Error(ErrorKind::design, std::string(names[i]) + " is empty");
    if (!named[i]->allFinite())
      throw Error(ErrorKind::design, std::string(names[i]) + " has non-finite entries");
  }

  const Index n = d.observations(), k = d.between_rank(), p = d.dimension(), q = d.within_rank();
  if (d.row_contrast.cols() != k)
    throw Error(ErrorKind::design, "L is " + dims(d.row_contrast) + " but A has " +
                                       std::to_string(k) + " columns");
  if (d.column_contrast.cols() != q)
    throw Error(ErrorKind::design, "R is " + dims(d.column_contrast) + " but B has " +
                                       std::to_string(q) + " columns");
  if (!(d.row_rank() <= k && k <= n))
    throw Error(ErrorKind::design, "need l <= k <= N, got l=" + std::to_string(d.row_rank()) +
                                       " k=" + std::to_string(k) + " N=" + std::to_string(n));
  if (!(d.column_rank() <= q && q <= p))
    throw Error(ErrorKind::design, "need r <= q <= p, got r=" + std::to_string(d.column_rank()) +
                                       " q=" + std::to_string(q) + " p=" + std::to_string(p));

  if (d.group_sizes.empty()) throw Error(ErrorKind::design, "no groups given");
  Index total = 0;
  for (std::size_t i = 0; i < d.group_sizes.size(); ++i) {
    if (d.group_sizes[i] <= 0)
      throw Error(ErrorKind::design, "group size must be positive", i);
    total += d.group_sizes[i];
  }
  if (total != n)
    throw Error(ErrorKind::design, "group sizes sum to " + std::to_string(total) + " but A has " +
                                       std::to_string(n) + " rows");

  require_full_rank(d.between, k, "A");
  require_full_rank(d.within, q, "B");
  require_full_rank(d.row_contrast, d.row_rank(), "L");
  require_full_rank(d.column_contrast, d.column_rank(), "R");
}

Matrix row_weight(const DesignSpec& d) {
  const Matrix gram_inv = inverse_spd(d.between.transpose() * d.between, "A'A");
  return inverse_spd(d.row_contrast * gram_inv * d.row_contrast.transpose(), "L(A'A)^{-1}L'");
}

Matrix column_weight(const DesignSpec& d) {
  const Matrix gram_inv = inverse_spd(d.within.transpose() * d.within, "B'B");
  return inverse_spd(d.column_contrast * gram_inv * d.column_contrast.transpose(),
                     "R(B'B)^{-1}R'");
}

HypothesisProjection hypothesis_projector(const DesignSpec& d) {
  const Matrix gram_inv = inverse_spd(d.between.transpose() * d.between, "A'A");
  const Matrix g = d.between * gram_inv * d.row_contrast.transpose();  // N x l
  const Matrix middle =
      inverse_spd(d.row_contrast * gram_inv * d.row_contrast.transpose(), "L(A'A)^{-1}L'");
  HypothesisProjection out;
  out.pi_h = g * middle * g.transpose();
  symmetrize(out.pi_h);
  out.h_diag = out.pi_h.diagonal();
  return out;
}

Matrix row_compressor(const DesignSpec& d) {
  const Matrix gram_inv = inverse_spd(d.within.transpose() * d.within, "B'B");
  const Matrix rb = d.column_contrast * gram_inv;  // r x q
  const Matrix root = inverse_sqrt_spd(rb * d.column_contrast.transpose(), "R(B'B)^{-1}R'");
  return root * rb * d.within.transpose();
}

BalancingWeights solve_balancing_weights(const Matrix& pi_a, const Vector& h_diag) {
  const Index n = pi_a.rows();
  if (pi_a.cols() != n || h_diag.size() != n)
    throw Error(ErrorKind::design, "balancing system shape mismatch");
  const Matrix residual_maker = Matrix::Identity(n, n) - pi_a;
  const Matrix coeff = hadamard_square(residual_maker);

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(coeff);

  BalancingWeights out;
  out.d = cod.solve(h_diag);
  const double scale = h_diag.norm();
  const double resid = (coeff * out.d - h_diag).norm();
  out.relative_residual = scale > 0.0 ? resid / scale : resid;
  if (!std::isfinite(out.relative_residual) || out.relative_residual > kBalancingTolerance)
    throw Error(ErrorKind::no_balancing_solution,
                "[(I-Pi_A)o(I-Pi_A)] d = diag(Pi_H) has relative residual " +
                    std::to_string(out.relative_residual) + " > 1e-8");
  return out;
}

Matrix build_omega(const Matrix& pi_h, const Matrix& pi_a, const Vector& d) {
  const Index n = pi_a.rows();
  const Matrix residual_maker = Matrix::Identity(n, n) - pi_a;
  Matrix omega = pi_h - residual_maker * d.asDiagonal() * residual_maker;
  symmetrize(omega);
  for (Index i = 0; i < n; ++i) {
    // Residue between 1e-10 and the solver tolerance is tolerated as well;
    // anything larger means d does not solve the balancing system.
    if (std::abs(omega(i, i)) > kBalancingTolerance)
      throw Error(ErrorKind::internal, "Omega diagonal entry " + std::to_string(i + 1) + " is " +
                                           std::to_string(omega(i, i)) +
                                           "; balancing weights are inconsistent");
    omega(i, i) = 0.0;
  }
  return omega;
}

ProjectionSet build_projection_set(const DesignSpec& design) {
  validate_design(design);
  ProjectionSet out;
  out.pi_a = projector(design.between);
  auto hyp = hypothesis_projector(design);
  out.pi_h = std::move(hyp.pi_h);
  out.h_diag = std::move(hyp.h_diag);

  out.compressor = row_compressor(design);
  const Index r = out.compressor.rows();
  if (r == out.compressor.cols() &&
      (out.compressor - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-14) {
    out.compressor = Matrix::Identity(r, r);
    out.compressor_is_identity = true;
  }

  auto weights = solve_balancing_weights(out.pi_a, out.h_diag);
  out.weights = std::move(weights.d);
  out.balancing_residual = weights.relative_residual;
  out.omega = build_omega(out.pi_h, out.pi_a, out.weights);
  return out;
}

Matrix compress(const Matrix& x, const ProjectionSet& projections) {
  if (projections.compressor_is_identity) return x;
  return x * projections.compressor.transpose();
}

}  // namespace gmanova
