#include <gtest/gtest.h>

#include <cmath>

#include "gmanova/gmanova.hpp"
#include "gmanova/oracle.hpp"
#include "support.hpp"

namespace gmanova {
namespace {

TEST(Decide, RejectsAboveCriticalValue) {
  const TestDecision d = decide(2.0, 1.0, 0.05);
  EXPECT_TRUE(d.reject);
  EXPECT_FALSE(d.degenerate);
  EXPECT_NEAR(d.p_value, normal_upper_tail(2.0), 1e-15);
  EXPECT_FALSE(decide(1.6, 1.0, 0.05).reject);
  EXPECT_TRUE(decide(1.65, 1.0, 0.05).reject);
  EXPECT_NEAR(decide(6.0, 4.0, 0.05).z, 3.0, 1e-15);
}

TEST(Decide, NonPositiveVarianceIsDegenerate) {
  for (double s0 : {-0.3, 0.0}) {
    const TestDecision d = decide(100.0, s0, 0.05);
    EXPECT_TRUE(d.degenerate);
    EXPECT_FALSE(d.reject);
    EXPECT_EQ(d.z, 0.0);
    EXPECT_EQ(d.p_value, 0.5);
  }
}

TEST(Decide, AlphaOutsideUnitIntervalRejected) {
  EXPECT_THROW(decide(1.0, 1.0, 0.0), Error);
  EXPECT_THROW(decide(1.0, 1.0, 1.0), Error);
}

TEST(StatisticT, NoNoiseEqualsQ) {
  std::mt19937_64 rng(3);
  for (int which = 0; which < 4; ++which) {
    const Scenario s = testing::random_scenario(which, rng, 15);
    const DesignSpec& d = s.design;
    const ProjectionSet proj = build_projection_set(d);
    const Matrix theta = testing::random_matrix(d.between_rank(), d.within_rank(), rng);
    const Matrix x = d.between * theta * d.within.transpose();
    const double q = true_q(theta, d);
    EXPECT_NEAR(statistic_t(x, proj.compressor, proj.omega), q, 1e-9 * std::max(1.0, q)) << s.name;

    Matrix null_theta = Matrix::Zero(d.between_rank(), d.within_rank());
    const Matrix x0 = d.between * null_theta * d.within.transpose();
    EXPECT_EQ(statistic_t(x0, proj.compressor, proj.omega), 0.0);
  }
}

TEST(StatisticT, CompressedRouteAndDecompositionAgree) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const Scenario s = testing::random_scenario(rep, rng, 30);
    const ProjectionSet proj = build_projection_set(s.design);
    const Matrix x = testing::random_matrix(s.design.observations(), s.design.dimension(), rng);
    const double t = statistic_t(x, proj.compressor, proj.omega);
    const double t2 = statistic_t_compressed(compress(x, proj), proj.omega);
    const double oracle_t = oracle::t_by_decomposition(x, s.design);
    EXPECT_NEAR(t, t2, 1e-10 * std::abs(t2) + 1e-12);
    EXPECT_NEAR(t, oracle_t, 1e-8 * std::abs(oracle_t) + 1e-12) << s.name;
  }
}

TEST(RunTest, NoiseFreeNullIsDegenerate) {
  const DesignSpec d = one_way_manova({5, 5}, 3).design;
  const GroupedSample s{Matrix::Zero(10, 3), d.group_sizes};
  const TestReport r = run_test(s, d, 0.05);
  EXPECT_EQ(r.t_stat, 0.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.reject);
  EXPECT_EQ(r.p_value, 0.5);
}

TEST(RunTest, ReportIsConsistent) {
  std::mt19937_64 rng(5);
  const Scenario s = one_way_manova({8, 9, 10}, 20);
  const TestPlan plan(s.design);
  for (int rep = 0; rep < 10; ++rep) {
    GroupedSample sample = testing::random_sample(s.design, rng);
    sample.x.topRows(8).array() += 0.4 * rep;
    const TestReport r = run_test(sample, plan, 0.05, true);
    ASSERT_GT(r.sigma0_hat, 0.0);
    EXPECT_NEAR(r.z, r.t_stat / std::sqrt(r.sigma0_hat), 1e-12 * std::abs(r.z) + 1e-15);
    EXPECT_EQ(r.reject, r.z > normal_quantile(0.95));
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    ASSERT_TRUE(r.diagnostics.has_value());
    EXPECT_TRUE(r.diagnostics->heuristic);
    EXPECT_GE(r.diagnostics->rho_n, 1.0);
    EXPECT_GE(r.diagnostics->a2_ratio, 0.0);
    EXPECT_NEAR(r.diagnostics->size_imbalance, 10.0 / 8.0, 1e-15);
  }
}

TEST(RunTest, SmallGroupErrorNamesGroup) {
  const DesignSpec d = one_way_manova({6, 2, 6}, 3).design;
  std::mt19937_64 rng(1);
  try {
    run_test(testing::random_sample(d, rng), d, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::estimator_undefined);
    EXPECT_EQ(e.group(), std::optional<std::size_t>(1));
  }
}

TEST(TrueQ, ZeroUnderNullAndFrobeniusForm) {
  std::mt19937_64 rng(6);
  const DesignSpec d = one_way_manova({4, 5, 6}, 4).design;
  Matrix equal_rows(3, 4);
  equal_rows.rowwise() = Eigen::RowVector4d(1.0, -2.0, 3.0, 0.5);
  EXPECT_NEAR(true_q(equal_rows, d), 0.0, 1e-12);

  DesignSpec p = profile_parallelism({4, 5}, 5).design;
  const Vector u = testing::random_matrix(2, 1, rng);
  const Vector v = testing::random_matrix(5, 1, rng);
  const Matrix theta = u * v.transpose();
  const Matrix root_a = sqrt_spd(row_weight(p), "A");
  const Matrix root_b = sqrt_spd(column_weight(p), "B");
  const Matrix core = root_a * p.row_contrast * theta * p.column_contrast.transpose() * root_b;
  EXPECT_NEAR(true_q(theta, p), core.squaredNorm(), 1e-10 * core.squaredNorm());
}

TEST(SigmaFull, NullModelAndTwoSampleClosedForm) {
  for (Index n : {3, 5, 10}) {
    const Index p = 4;
    const TestPlan plan(one_way_manova({n, n}, p).design);
    const MeanModel model{Matrix::Zero(2, p), {Matrix::Identity(p, p), Matrix::Identity(p, p)}};
    const ModelFunctionals f = sigma_full(model, plan);
    EXPECT_EQ(f.q, 0.0);
    EXPECT_NEAR(f.sigma2, f.sigma0_sq, 1e-14);
    EXPECT_NEAR(f.sigma0_sq, oracle::two_sample_sigma0(n, p), 1e-10);
  }
}

TEST(SigmaFull, RejectsIndefiniteCovariance) {
  const TestPlan plan(one_way_manova({4, 4}, 2).design);
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  const MeanModel model{Matrix::Zero(2, 2), {Matrix::Identity(2, 2), bad}};
  try {
    sigma_full(model, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
    EXPECT_EQ(e.group(), std::optional<std::size_t>(1));
  }
}

// T is linear plus a zero-diagonal quadratic form in the errors, so its mean
// is 𝒬 and its variance is σ² for any error law with finite fourth moments.
TEST(SigmaFull, MatchesMonteCarloMomentsOfT) {
  const Scenario s = growth_curve({6, 8, 7}, 9, 2);
  const TestPlan plan(s.design);
  Matrix theta = Matrix::Zero(3, 3);
  theta(0, 0) = 0.8;
  theta(1, 2) = -0.5;
  const std::vector<GroupErrors> groups{
      {ErrorDistribution::standardized_gamma(2.0), CovarianceSpec::ar1(0.4)},
      {ErrorDistribution::elliptical_t(9.0), CovarianceSpec::identity(2.0)},
      {ErrorDistribution::gaussian(), CovarianceSpec::compound_symmetry(0.3)}};
  const DataGenerator gen(s.design, theta, groups);
  const ModelFunctionals f = sigma_full(gen.model(), plan);
  ASSERT_GT(f.q, 0.0);

  const std::size_t reps = 20000;
  std::vector<double> t(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    auto rng = substream(99, r);
    const GroupedSample x = gen.draw_sample(rng);
    t[r] = statistic_t_compressed(compress(x.x, plan.projections()), plan.projections().omega);
  }
  double mean = 0.0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(reps);
  double m2 = 0.0, m4 = 0.0;
  for (double v : t) {
    m2 += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  m2 /= static_cast<double>(reps - 1);
  m4 /= static_cast<double>(reps);
  const double se_mean = std::sqrt(m2 / static_cast<double>(reps));
  const double se_var = std::sqrt((m4 - m2 * m2) / static_cast<double>(reps));
  EXPECT_LE(std::abs(mean - f.q), 3.0 * se_mean) << "mean " << mean << " q " << f.q;
  EXPECT_LE(std::abs(m2 - f.sigma2), 3.0 * se_var) << "var " << m2 << " sigma2 " << f.sigma2;
}

TEST(AsymptoticPower, Examples) {
  EXPECT_NEAR(asymptotic_power(0.0, 2.0, 2.0, 0.05), 0.05, 1e-14);
  const double z = normal_quantile(0.95);
  EXPECT_NEAR(asymptotic_power(z * 3.0, 9.0, 9.0, 0.05), 0.5, 1e-14);
  EXPECT_EQ(asymptotic_power(40.0, 1.0, 1.0, 0.05), 1.0);
  EXPECT_GT(asymptotic_power(10.0, 1.0, 1.0, 0.05), 0.999999);
  EXPECT_GE(asymptotic_power(2.0, 1.0, 0.5, 0.05), asymptotic_power(1.0, 1.0, 0.5, 0.05));
  EXPECT_THROW(asymptotic_power(1.0, 0.0, 0.0, 0.05), Error);
}

TEST(Diagnostics, TwoSampleRho) {
  const TestPlan plan(one_way_manova({3, 3}, 4).design);
  const MeanModel model{Matrix::Zero(2, 4), {Matrix::Identity(4, 4), Matrix::Identity(4, 4)}};
  const DiagnosticsReport r = model_diagnostics(model, plan, 3.0);
  EXPECT_NEAR(r.rho_n, 2.25, 1e-12);
  ASSERT_TRUE(r.a3_ratio.has_value());
  EXPECT_EQ(*r.a3_ratio, 0.0);
  EXPECT_EQ(r.d1_bound, std::optional<double>(3.0));
  EXPECT_FALSE(r.heuristic);
}

TEST(Diagnostics, A2RatioShrinksWithDimension) {
  double previous = INFINITY;
  for (Index p : {5, 20, 80}) {
    const TestPlan plan(one_way_manova({5, 6, 7}, p).design);
    const std::vector<Matrix> psis(3, Matrix::Identity(p, p));
    const DiagnosticsReport r = assumption_diagnostics(psis, plan.projections().omega, {5, 6, 7});
    EXPECT_LT(r.a2_ratio, previous);
    previous = r.a2_ratio;
  }
}

TEST(Diagnostics, AlternativeHasPositiveA3) {
  const TestPlan plan(one_way_manova({5, 6}, 3).design);
  Matrix theta = Matrix::Zero(2, 3);
  theta(0, 0) = 1.0;
  const MeanModel model{theta, {Matrix::Identity(3, 3), Matrix::Identity(3, 3)}};
  const DiagnosticsReport r = model_diagnostics(model, plan);
  ASSERT_TRUE(r.a3_ratio.has_value());
  EXPECT_GT(*r.a3_ratio, 0.0);
}

TEST(Diagnostics, AllZeroOmegaIsUndefined) {
  try {
    assumption_diagnostics({Matrix::Identity(2, 2)}, Matrix::Zero(4, 4), {4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::diagnostic_undefined);
  }
}

}  // namespace
}  // namespace gmanova
