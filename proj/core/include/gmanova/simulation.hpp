#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gmanova/scenarios.hpp"
#include "gmanova/test_engine.hpp"

namespace gmanova {

/// Law of the standardized error rows z (mean 0, identity covariance).
struct ErrorDistribution {
  enum class Kind { gaussian, elliptical_t, standardized_gamma, rademacher };

  Kind kind = Kind::gaussian;
  double parameter = 0.0;  // degrees of freedom (t) or shape (gamma)

  static ErrorDistribution gaussian() { return {Kind::gaussian, 0.0}; }
  static ErrorDistribution elliptical_t(double df) { return {Kind::elliptical_t, df}; }
  static ErrorDistribution standardized_gamma(double shape) {
    return {Kind::standardized_gamma, shape};
  }
  static ErrorDistribution rademacher() { return {Kind::rademacher, 0.0}; }

  /// Throws ErrorKind::config for df <= 4 or shape <= 0.
  void validate() const;
  /// max_i E[z_i^4].
  double fourth_moment() const;
  std::string name() const;
};

struct CovarianceSpec {
  enum class Kind { identity, compound_symmetry, ar1, diagonal_ramp };

  Kind kind = Kind::identity;
  double rho = 0.0;
  double lo = 1.0;
  double hi = 1.0;
  double scale = 1.0;

  static CovarianceSpec identity(double scale = 1.0) { return {Kind::identity, 0.0, 1.0, 1.0, scale}; }
  static CovarianceSpec compound_symmetry(double rho, double scale = 1.0) {
    return {Kind::compound_symmetry, rho, 1.0, 1.0, scale};
  }
  static CovarianceSpec ar1(double rho, double scale = 1.0) { return {Kind::ar1, rho, 1.0, 1.0, scale}; }
  static CovarianceSpec diagonal_ramp(double lo, double hi, double scale = 1.0) {
    return {Kind::diagonal_ramp, 0.0, lo, hi, scale};
  }

  /// p x p covariance. Throws ErrorKind::config when it would not be positive definite.
  Matrix matrix(Index p) const;
  std::string name() const;
};

/// Σ together with its cached symmetric square root.
class CovarianceFactor {
 public:
  CovarianceFactor(const CovarianceSpec& spec, Index p);

  const Matrix& sigma() const { return sigma_; }
  const Matrix& root() const { return root_; }
  /// Rows z' -> z' Σ^{1/2}, in place.
  void apply(Matrix& rows) const;

 private:
  Matrix sigma_;
  Matrix root_;
  bool scaled_identity_ = false;
  double root_scale_ = 1.0;
};

/// Independent generator for replication `index` of a run seeded with `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

/// n x p matrix of i.i.d. rows drawn from `dist`.
Matrix sample_errors(const ErrorDistribution& dist, Index n, Index p, std::mt19937_64& rng);
Matrix sample_errors(const ErrorDistribution& dist, Index n, Index p, std::uint64_t seed);

struct GroupErrors {
  ErrorDistribution distribution;
  CovarianceSpec covariance;
};

/// Draws X = A Θ B' + E with E rows z' Σ_i^{1/2} in group i.
class DataGenerator {
 public:
  DataGenerator(const DesignSpec& design, Matrix theta, std::vector<GroupErrors> groups);

  Matrix draw(std::mt19937_64& rng) const;
  GroupedSample draw_sample(std::mt19937_64& rng) const;
  MeanModel model() const;
  const Matrix& mean() const { return mean_; }
  const std::vector<Index>& group_sizes() const { return sizes_; }
  double fourth_moment() const;

 private:
  Matrix mean_;
  std::vector<Index> sizes_;
  Matrix theta_;
  std::vector<GroupErrors> groups_;
  std::vector<CovarianceFactor> factors_;
};

struct MonteCarloConfig {
  Scenario scenario;
  Matrix theta;                     // k x q
  std::vector<GroupErrors> groups;  // one entry per group
  double alpha = 0.05;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: GMANOVA_THREADS or hardware concurrency
};

struct ReplicationResult {
  double t = 0.0;
  double sigma0_hat = 0.0;
  double z = 0.0;
  bool reject = false;
  bool degenerate = false;
  Vector a2_hat;
  Matrix b_hat;
};

struct SimulationSummary {
  std::size_t replications = 0;
  std::size_t rejections = 0;
  std::size_t degenerate = 0;
  double rejection_rate = 0.0;
  double mc_standard_error = 0.0;
  double z_mean = 0.0;
  double z_variance = 0.0;
  double ks_distance = 0.0;
  double t_mean = 0.0;
  double q = 0.0;
  double sigma2 = 0.0;
  double sigma0_sq = 0.0;
  double predicted_power = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
};

/// Thread count: `requested` if nonzero, else GMANOVA_THREADS (0 = auto),
/// else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Per-replication results in replication order; identical for any thread
/// count. Errors are rethrown with the replication index in the message.
std::vector<ReplicationResult> run_replications(const MonteCarloConfig& config,
                                                const TestPlan& plan);

SimulationSummary summarize(const std::vector<ReplicationResult>& results,
                            const ModelFunctionals& truth, double alpha, std::uint64_t seed);

/// Validates the config, builds the plan, runs and summarizes.
SimulationSummary monte_carlo(const MonteCarloConfig& config);

/// Kolmogorov-Smirnov distance between the empirical law of `values` and N(0, 1).
double ks_distance_normal(std::vector<double> values);

/// Scale `direction` so that 𝒬 / sqrt(σ²) equals `ratio` under the given
/// covariances. Throws ErrorKind::config if the direction lies in the null.
Matrix theta_for_signal_ratio(const TestPlan& plan, const Matrix& direction,
                              const std::vector<Matrix>& sigmas, double ratio);

/// Canonical alternative direction: first row of Θ set to (1, 2, ..., q) / q.
Matrix default_signal_direction(const DesignSpec& design);

}  // namespace gmanova
