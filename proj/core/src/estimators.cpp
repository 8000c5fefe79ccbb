#include "gmanova/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gmanova/error.hpp"

namespace gmanova {

std::vector<Index> GroupedSample::group_offsets() const {
  std::vector<Index> offsets(group_sizes.size(), 0);
  for (std::size_t i = 1; i < group_sizes.size(); ++i)
    offsets[i] = offsets[i - 1] + group_sizes[i - 1];
  return offsets;
}

Eigen::Block<const Matrix> GroupedSample::block(Index i) const {
  Index offset = 0;
  for (Index j = 0; j < i; ++j) offset += group_sizes[j];
  return x.middleRows(offset, group_sizes[i]);
}

void validate_sample(const GroupedSample& sample) {
  if (sample.group_sizes.empty()) throw Error(ErrorKind::input, "sample has no groups");
  Index total = 0;
  for (std::size_t i = 0; i < sample.group_sizes.size(); ++i) {
    if (sample.group_sizes[i] <= 0) throw Error(ErrorKind::input, "empty group", i);
    total += sample.group_sizes[i];
  }
  if (total != sample.x.rows())
    throw Error(ErrorKind::input, "group sizes sum to " + std::to_string(total) + " but X has " +
                                      std::to_string(sample.x.rows()) + " rows");
  if (!sample.x.allFinite()) throw Error(ErrorKind::input, "X has non-finite entries");
}

Matrix GroupScatter::scatter() const {
  return residuals.transpose() * residuals / dof();
}

GroupScatter scatter_from_compressed(const Matrix& y_i, const Matrix& pi_a_i, Index rank) {
  const Index n = y_i.rows();
  if (n <= rank)
    throw Error(ErrorKind::degenerate_group, "N_i = " + std::to_string(n) +
                                                 " does not exceed rank(A_i) = " +
                                                 std::to_string(rank));
  GroupScatter out;
  out.size = n;
  out.rank = rank;
  out.residuals = y_i - pi_a_i * y_i;
  // Residuals at the rounding level of the fit are exact zeros.
  constexpr double kResidualFloor = 64.0 * std::numeric_limits<double>::epsilon();
  if (out.residuals.squaredNorm() <= kResidualFloor * kResidualFloor * y_i.squaredNorm())
    out.residuals.setZero();

  const double dof = out.dof();
  const Vector row_norms = out.residuals.rowwise().squaredNorm();
  out.q = row_norms.squaredNorm() / dof;
  out.trace_s = row_norms.sum() / dof;
  if (n <= out.residuals.cols()) {
    const Matrix gram = out.residuals * out.residuals.transpose();
    out.trace_s2 = gram.squaredNorm() / (dof * dof);
  } else {
    const Matrix s = out.residuals.transpose() * out.residuals;
    out.trace_s2 = s.squaredNorm() / (dof * dof);
  }
  return out;
}

GroupScatter group_residual_scatter(const Matrix& x_i, const Matrix& a_i, const Matrix& compressor) {
  if (x_i.rows() != a_i.rows() || x_i.cols() != compressor.cols())
    throw Error(ErrorKind::input, "group block shapes do not match");
  if (!x_i.allFinite()) throw Error(ErrorKind::input, "group data has non-finite entries");
  return scatter_from_compressed(x_i * compressor.transpose(), projector(a_i),
                                 numerical_rank(a_i));
}

TauCoefficients tau_coefficients(const Matrix& pi_a_i, Index n_i, Index k_i) {
  const Index dof = n_i - k_i;
  if (dof < 2)
    throw Error(ErrorKind::estimator_undefined,
                "need N_i - k_i >= 2, got " + std::to_string(dof));
  if (pi_a_i.rows() != n_i || pi_a_i.cols() != n_i)
    throw Error(ErrorKind::input, "Pi_{A_i} must be N_i x N_i");

  const Matrix h = hadamard_square(Matrix::Identity(n_i, n_i) - pi_a_i);
  TauCoefficients tau;
  tau.first = h.trace();
  tau.second = h.squaredNorm();  // h is symmetric
  const double m = static_cast<double>(dof);
  const double lead = m * (m + 2.0) * tau.second;
  tau.third = (m - 1.0) / (m * m) * (lead - 3.0 * tau.first * tau.first);
  if (!(std::abs(tau.third) > 1e-12 * (m - 1.0) / (m * m) * lead))
    throw Error(ErrorKind::estimator_undefined, "tau_3 vanishes");
  return tau;
}

double a2_hat(double trace_s, double trace_s2, double q, const TauCoefficients& tau, Index n_i,
              Index k_i) {
  const double m = static_cast<double>(n_i - k_i);
  const double t1sq = tau.first * tau.first;
  const double bracket = (m * m * tau.second - t1sq) * trace_s2 -
                         (m * tau.second - t1sq) * trace_s * trace_s -
                         (m - 1.0) * tau.first * q;
  return bracket / (m * tau.third);
}

double a2_hat(const Matrix& s_i, double q_i, const TauCoefficients& tau, Index n_i, Index k_i) {
  return a2_hat(s_i.trace(), s_i.squaredNorm(), q_i, tau, n_i, k_i);
}

double a2_hat(const GroupScatter& scatter, const TauCoefficients& tau) {
  return a2_hat(scatter.trace_s, scatter.trace_s2, scatter.q, tau, scatter.size, scatter.rank);
}

double b_hat(const Matrix& s_i, const Matrix& s_j) {
  if (s_i.rows() != s_j.rows() || s_i.cols() != s_j.cols())
    throw Error(ErrorKind::input, "b_hat: scatter matrices differ in shape");
  return trace_of_product(s_i, s_j);
}

double b_hat(const GroupScatter& a, const GroupScatter& b) {
  const double r = static_cast<double>(a.residuals.cols());
  const double na = static_cast<double>(a.size), nb = static_cast<double>(b.size);
  const double denom = a.dof() * b.dof();
  if (na * nb <= r * (na + nb + r)) {
    const Matrix cross = a.residuals * b.residuals.transpose();
    return cross.squaredNorm() / denom;
  }
  const Matrix sa = a.residuals.transpose() * a.residuals;
  const Matrix sb = b.residuals.transpose() * b.residuals;
  return trace_of_product(sa, sb) / denom;
}

Matrix v_hat(const Vector& a2, const Matrix& b, const std::vector<Index>& group_sizes) {
  const Index g = static_cast<Index>(group_sizes.size());
  if (a2.size() != g || b.rows() != g || b.cols() != g)
    throw Error(ErrorKind::input, "v_hat: estimate shapes do not match the group count");
  Index n = 0;
  for (auto s : group_sizes) n += s;
  Matrix v(n, n);
  Index row = 0;
  for (Index i = 0; i < g; ++i) {
    Index col = 0;
    for (Index j = 0; j < g; ++j) {
      v.block(row, col, group_sizes[i], group_sizes[j]).setConstant(i == j ? a2(i) : b(i, j));
      col += group_sizes[j];
    }
    row += group_sizes[i];
  }
  return v;
}

double sigma0_hat(const Matrix& omega, const Matrix& v) {
  if (omega.rows() != v.rows() || omega.cols() != v.cols())
    throw Error(ErrorKind::input, "sigma0_hat: Omega and V differ in shape");
  return 2.0 * omega.cwiseProduct(omega).cwiseProduct(v).sum();
}

Matrix omega_block_weights(const Matrix& omega, const std::vector<Index>& group_sizes) {
  const Index g = static_cast<Index>(group_sizes.size());
  Matrix w(g, g);
  Index row = 0;
  for (Index i = 0; i < g; ++i) {
    Index col = 0;
    for (Index j = 0; j < g; ++j) {
      w(i, j) = omega.block(row, col, group_sizes[i], group_sizes[j]).squaredNorm();
      col += group_sizes[j];
    }
    row += group_sizes[i];
  }
  return w;
}

double sigma0_from_blocks(const Matrix& block_weights, const Vector& a2, const Matrix& b) {
  const Index g = block_weights.rows();
  double total = 0.0;
  for (Index i = 0; i < g; ++i)
    for (Index j = 0; j < g; ++j) total += block_weights(i, j) * (i == j ? a2(i) : b(i, j));
  return 2.0 * total;
}

std::vector<GroupPlan> plan_groups(const DesignSpec& design) {
  std::vector<GroupPlan> plans;
  plans.reserve(design.group_sizes.size());
  Index offset = 0;
  for (std::size_t i = 0; i < design.group_sizes.size(); ++i) {
    const Index n_i = design.group_sizes[i];
    const Matrix a_i = design.between.middleRows(offset, n_i);
    offset += n_i;
    GroupPlan plan;
    plan.pi_a_i = projector(a_i);
    plan.rank = numerical_rank(a_i);
    if (n_i <= plan.rank)
      throw Error(ErrorKind::degenerate_group,
                  "N_i = " + std::to_string(n_i) + " does not exceed rank(A_i) = " +
                      std::to_string(plan.rank),
                  i);
    try {
      plan.tau = tau_coefficients(plan.pi_a_i, n_i, plan.rank);
    } catch (const Error& e) {
      if (e.group()) throw;
      throw Error(e.kind(),
                  "N_i = " + std::to_string(n_i) + ", k_i = " + std::to_string(plan.rank) +
                      " cannot support the variance estimators",
                  i);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

Matrix VarianceEstimate::v_hat() const {
  std::vector<Index> sizes;
  sizes.reserve(groups.size());
  for (const auto& g : groups) sizes.push_back(g.size);
  return gmanova::v_hat(a2_hat, b_hat, sizes);
}

VarianceEstimate estimate_variance(const Matrix& compressed, const std::vector<GroupPlan>& plans,
                                   const Matrix& block_weights) {
  const Index g = static_cast<Index>(plans.size());
  VarianceEstimate out;
  out.groups.reserve(plans.size());
  out.tau.reserve(plans.size());
  out.a2_hat.resize(g);
  out.b_hat.resize(g, g);

  Index offset = 0;
  for (Index i = 0; i < g; ++i) {
    const auto& plan = plans[static_cast<std::size_t>(i)];
    const Index n_i = plan.pi_a_i.rows();
    out.groups.push_back(
        scatter_from_compressed(compressed.middleRows(offset, n_i), plan.pi_a_i, plan.rank));
    out.tau.push_back(plan.tau);
    out.a2_hat(i) = a2_hat(out.groups.back(), plan.tau);
    out.b_hat(i, i) = out.a2_hat(i);
    offset += n_i;
  }
  for (Index i = 0; i < g; ++i)
    for (Index j = i + 1; j < g; ++j) {
      const double value = b_hat(out.groups[static_cast<std::size_t>(i)],
                                 out.groups[static_cast<std::size_t>(j)]);
      out.b_hat(i, j) = out.b_hat(j, i) = value;
    }
  out.sigma0_hat = sigma0_from_blocks(block_weights, out.a2_hat, out.b_hat);
  return out;
}

}  // namespace gmanova
