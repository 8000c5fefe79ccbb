#pragma once

#include <vector>

#include "gmanova/linalg.hpp"

namespace gmanova {

/// Known matrices of the growth-curve model X = A Θ B' + E and of the
/// bilateral hypothesis L Θ R' = O.
struct DesignSpec {
  Matrix between;            // A, N x k
  Matrix within;             // B, p x q
  Matrix row_contrast;       // L, l x k
  Matrix column_contrast;    // R, r x q
  std::vector<Index> group_sizes;  // N_1..N_g, rows of A ordered group-contiguously

  Index observations() const { return between.rows(); }    // N
  Index between_rank() const { return between.cols(); }    // k
  Index dimension() const { return within.rows(); }        // p
  Index within_rank() const { return within.cols(); }      // q
  Index row_rank() const { return row_contrast.rows(); }   // l
  Index column_rank() const { return column_contrast.rows(); }  // r
  Index groups() const { return static_cast<Index>(group_sizes.size()); }

  /// Starting row of every group: 0, N_1, N_1 + N_2, ...
  std::vector<Index> group_offsets() const;
};

/// Checks shapes, finiteness, group partition and full ranks (A, B, L, R).
/// Throws ErrorKind::design with a message naming the offending matrix.
void validate_design(const DesignSpec& design);

/// {L (A'A)^{-1} L'}^{-1}, the implicit row weight of the trace functional.
Matrix row_weight(const DesignSpec& design);
/// {R (B'B)^{-1} R'}^{-1}, the implicit column weight.
Matrix column_weight(const DesignSpec& design);

struct HypothesisProjection {
  Matrix pi_h;    // N x N, rank l
  Vector h_diag;  // h_11..h_NN
};

/// Π_H = A(A'A)^{-1}L' {L(A'A)^{-1}L'}^{-1} L(A'A)^{-1}A'.
HypothesisProjection hypothesis_projector(const DesignSpec& design);

/// r x p compressor {R(B'B)^{-1}R'}^{-1/2} R (B'B)^{-1} B'.
Matrix row_compressor(const DesignSpec& design);

/// Relative residual above which the balancing system counts as unsolvable.
inline constexpr double kBalancingTolerance = 1e-8;

struct BalancingWeights {
  Vector d;
  double relative_residual = 0.0;
};

/// Minimum-norm least-squares solution of [(I - Π_A) ⊙ (I - Π_A)] d = diag(Π_H).
/// Throws ErrorKind::no_balancing_solution when the relative residual exceeds
/// kBalancingTolerance.
BalancingWeights solve_balancing_weights(const Matrix& pi_a, const Vector& h_diag);

/// Ω = Π_H - (I - Π_A) diag(d) (I - Π_A) with its diagonal set to exactly zero.
/// Diagonal residue above kBalancingTolerance raises ErrorKind::internal.
Matrix build_omega(const Matrix& pi_h, const Matrix& pi_a, const Vector& d);

/// Everything the statistic needs from the design.
struct ProjectionSet {
  Matrix pi_a;
  Matrix pi_h;
  Vector h_diag;
  Matrix compressor;  // 𝒫, r x p
  bool compressor_is_identity = false;
  Vector weights;     // d
  double balancing_residual = 0.0;
  Matrix omega;       // Ω
};

/// Validates `design` and builds Π_A, Π_H, 𝒫, d and Ω.
ProjectionSet build_projection_set(const DesignSpec& design);

/// Y = X 𝒫' without a product when 𝒫 is the identity.
Matrix compress(const Matrix& x, const ProjectionSet& projections);

}  // namespace gmanova
