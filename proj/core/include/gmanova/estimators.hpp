#pragma once

#include <vector>

#include "gmanova/design.hpp"

namespace gmanova {

/// N x p observations stored group-contiguously.
struct GroupedSample {
  Matrix x;
  std::vector<Index> group_sizes;

  Index groups() const { return static_cast<Index>(group_sizes.size()); }
  std::vector<Index> group_offsets() const;
  /// Rows of group `i` (zero-based).
  Eigen::Block<const Matrix> block(Index i) const;
};

/// Throws ErrorKind::input when `sample` does not partition into `sizes` or
/// has non-finite entries.
void validate_sample(const GroupedSample& sample);

/// Within-group residual statistics of one group, kept in Gram form.
///
/// `residuals` holds the compressed residual rows 𝒫(x_j - x̂_j), so the
/// r x r scatter S_i = residuals' residuals / (N_i - k_i) is never needed to
/// evaluate tr(S_i), tr(S_i^2), tr(S_i S_j) or Q_i.
struct GroupScatter {
  Matrix residuals;  // N_i x r
  Index size = 0;    // N_i
  Index rank = 0;    // k_i
  double q = 0.0;    // Q_i
  double trace_s = 0.0;
  double trace_s2 = 0.0;

  double dof() const { return static_cast<double>(size - rank); }
  /// S_i, r x r.
  Matrix scatter() const;
};

/// S_i, Q_i and k_i for one group from raw rows `x_i` (N_i x p), its block of
/// the between design `a_i` (N_i x k) and the compressor (r x p).
/// Throws ErrorKind::degenerate_group if N_i <= k_i.
GroupScatter group_residual_scatter(const Matrix& x_i, const Matrix& a_i, const Matrix& compressor);

/// Same statistics from already-compressed rows y_i = x_i 𝒫' and a
/// precomputed within-group projector.
GroupScatter scatter_from_compressed(const Matrix& y_i, const Matrix& pi_a_i, Index rank);

struct TauCoefficients {
  double first = 0.0;   // tr(H), H = (I - Π_{A_i}) ⊙ (I - Π_{A_i})
  double second = 0.0;  // tr(H^2)
  double third = 0.0;
};

/// Throws ErrorKind::estimator_undefined if N_i - k_i < 2 or tau_3 == 0.
TauCoefficients tau_coefficients(const Matrix& pi_a_i, Index n_i, Index k_i);

/// Unbiased estimator of tr(Ψ_i^2) from the scalar summaries of S_i.
double a2_hat(double trace_s, double trace_s2, double q, const TauCoefficients& tau, Index n_i,
              Index k_i);
double a2_hat(const Matrix& s_i, double q_i, const TauCoefficients& tau, Index n_i, Index k_i);
double a2_hat(const GroupScatter& scatter, const TauCoefficients& tau);

/// tr(S_i S_j), unbiased for tr(Ψ_i Ψ_j) when i != j.
double b_hat(const Matrix& s_i, const Matrix& s_j);
double b_hat(const GroupScatter& a, const GroupScatter& b);

/// N x N block matrix with a2(i) on diagonal blocks and b(i, j) off them.
/// The diagonal of `b` is ignored.
Matrix v_hat(const Vector& a2, const Matrix& b, const std::vector<Index>& group_sizes);

/// 2 tr((Ω ⊙ Ω) V). May be <= 0 for estimated V; never clamped.
double sigma0_hat(const Matrix& omega, const Matrix& v);

/// W(i, j) = 1'(Ω_ij ⊙ Ω_ij)1 per block, so that 2 tr((Ω ⊙ Ω) V) = 2 Σ W(i, j) V_ij.
Matrix omega_block_weights(const Matrix& omega, const std::vector<Index>& group_sizes);
double sigma0_from_blocks(const Matrix& block_weights, const Vector& a2, const Matrix& b);

/// Per-group quantities that depend only on the design.
struct GroupPlan {
  Matrix pi_a_i;  // Π_{A_i}
  Index rank = 0; // k_i
  TauCoefficients tau;
};

/// Throws with the offending group index when a group cannot support the
/// estimators (degenerate_group or estimator_undefined).
std::vector<GroupPlan> plan_groups(const DesignSpec& design);

struct VarianceEstimate {
  std::vector<GroupScatter> groups;
  std::vector<TauCoefficients> tau;
  Vector a2_hat;     // â_{i,2}
  Matrix b_hat;      // g x g; b_hat(i, i) = â_{i,2}
  double sigma0_hat = 0.0;

  /// V̂, N x N.
  Matrix v_hat() const;
};

/// S_i, Q_i, â, b̂ and σ̂₀² from the compressed data Y = X 𝒫' (N x r).
VarianceEstimate estimate_variance(const Matrix& compressed, const std::vector<GroupPlan>& plans,
                                   const Matrix& block_weights);

}  // namespace gmanova
