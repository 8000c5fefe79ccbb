#include <algorithm>
#include <cmath>
#include <limits>

#include "gmanova/error.hpp"
#include "gmanova/test_engine.hpp"

namespace gmanova {

namespace {

double off_diagonal_ratio(const Matrix& omega) {
  const Index n = omega.rows();
  double largest = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) largest = std::max(largest, std::abs(omega(i, j)));
  if (largest == 0.0)
    throw Error(ErrorKind::diagnostic_undefined, "every off-diagonal entry of Omega is zero");

  const double zero_cut = 1e-12 * largest;
  double smallest = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      const double a = std::abs(omega(i, j));
      if (a > zero_cut) smallest = std::min(smallest, a);
    }
  return (largest * largest) / (smallest * smallest);
}

}  // namespace

DiagnosticsReport assumption_diagnostics(const std::vector<Matrix>& psis, const Matrix& omega,
                                         const std::vector<Index>& group_sizes,
                                         const Matrix* m_weighted,
                                         const std::vector<Matrix>* sigmas,
                                         std::optional<double> fourth_moment) {
  const Index g = static_cast<Index>(group_sizes.size());
  if (static_cast<Index>(psis.size()) != g)
    throw Error(ErrorKind::input, "need one Psi matrix per group");

  DiagnosticsReport out;
  out.rho_n = off_diagonal_ratio(omega);

  // Index set 𝔍: pairs of groups whose Ω block carries weight.
  const Matrix weights = omega_block_weights(omega, group_sizes);
  const double weight_cut = 1e-20 * weights.maxCoeff();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> admissible(g, g);
  std::vector<Matrix> products(static_cast<std::size_t>(g * g));
  double b_sum = 0.0;
  for (Index i = 0; i < g; ++i)
    for (Index j = 0; j < g; ++j) {
      admissible(i, j) = weights(i, j) > weight_cut;
      products[static_cast<std::size_t>(i * g + j)] =
          psis[static_cast<std::size_t>(i)] * psis[static_cast<std::size_t>(j)];
      if (admissible(i, j)) b_sum += products[static_cast<std::size_t>(i * g + j)].trace();
    }

  double psi_max = -std::numeric_limits<double>::infinity();
  for (Index a = 0; a < g; ++a)
    for (Index b = 0; b < g; ++b)
      for (Index c = 0; c < g; ++c)
        for (Index d = 0; d < g; ++d) {
          const Index idx[4] = {a, b, c, d};
          bool ok = true;
          for (int k = 0; k < 4 && ok; ++k)
            for (int l = 0; l < 4 && ok; ++l)
              if (k != l && !admissible(idx[k], idx[l])) ok = false;
          if (!ok) continue;
          const double psi = trace_of_product(products[static_cast<std::size_t>(a * g + b)],
                                              products[static_cast<std::size_t>(c * g + d)]);
          psi_max = std::max(psi_max, psi);
        }
  if (!std::isfinite(psi_max) || b_sum == 0.0)
    throw Error(ErrorKind::diagnostic_undefined, "no admissible group tuple for the A2 ratio");
  out.a2_ratio = psi_max / (b_sum * b_sum);

  if (m_weighted && sigmas) {
    double quad_sum = 0.0, quad_sq_sum = 0.0, norm_max = 0.0;
    Index row = 0;
    for (Index i = 0; i < g; ++i) {
      const Matrix& sigma = (*sigmas)[static_cast<std::size_t>(i)];
      for (Index j = 0; j < group_sizes[static_cast<std::size_t>(i)]; ++j, ++row) {
        const auto m = m_weighted->row(row);
        const double v = (m * sigma).dot(m);
        quad_sum += v;
        quad_sq_sum += v * v;
        norm_max = std::max(norm_max, m.squaredNorm());
      }
    }
    // 𝓜 = 1 when every m_(i) vanishes; exact zeros are not reachable in
    // floating point, so compare against the scale of Σ.
    double sigma_scale = 1.0;
    for (const auto& s : *sigmas) sigma_scale = std::max(sigma_scale, s.diagonal().maxCoeff());
    const bool all_zero = norm_max * sigma_scale <= 1e-20;
    out.a3_ratio = all_zero ? quad_sq_sum : quad_sq_sum / (quad_sum * quad_sum);
  }

  out.d1_bound = fourth_moment;
  const auto [lo, hi] = std::minmax_element(group_sizes.begin(), group_sizes.end());
  out.size_imbalance = static_cast<double>(*hi) / static_cast<double>(*lo);
  return out;
}

DiagnosticsReport model_diagnostics(const MeanModel& model, const TestPlan& plan,
                                    std::optional<double> fourth_moment) {
  const ModelFunctionals f = sigma_full(model, plan);
  return assumption_diagnostics(f.psis, plan.projections().omega, plan.design().group_sizes,
                                &f.m_weighted, &model.sigmas, fourth_moment);
}

DiagnosticsReport data_diagnostics(const VarianceEstimate& estimate, const TestPlan& plan) {
  std::vector<Matrix> scatters;
  scatters.reserve(estimate.groups.size());
  for (const auto& g : estimate.groups) scatters.push_back(g.scatter());
  DiagnosticsReport out =
      assumption_diagnostics(scatters, plan.projections().omega, plan.design().group_sizes);
  out.heuristic = true;
  return out;
}

}  // namespace gmanova
