#include "gmanova/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "gmanova/error.hpp"
#include "gmanova/normal.hpp"

namespace gmanova {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Distributions

void ErrorDistribution::validate() const {
  switch (kind) {
    case Kind::elliptical_t:
      if (!(parameter > 4.0))
        throw Error(ErrorKind::config, "elliptical_t needs df > 4 for finite fourth moments");
      break;
    case Kind::standardized_gamma:
      if (!(parameter > 0.0)) throw Error(ErrorKind::config, "gamma shape must be positive");
      break;
    default:
      break;
  }
}

double ErrorDistribution::fourth_moment() const {
  switch (kind) {
    case Kind::gaussian: return 3.0;
    case Kind::elliptical_t: return 3.0 * (parameter - 2.0) / (parameter - 4.0);
    case Kind::standardized_gamma: return 3.0 + 6.0 / parameter;
    case Kind::rademacher: return 1.0;
  }
  return 0.0;
}

std::string ErrorDistribution::name() const {
  switch (kind) {
    case Kind::gaussian: return "gaussian";
    case Kind::elliptical_t: return "elliptical_t(" + format_number(parameter) + ")";
    case Kind::standardized_gamma: return "standardized_gamma(" + format_number(parameter) + ")";
    case Kind::rademacher: return "rademacher";
  }
  return "unknown";
}

Matrix CovarianceSpec::matrix(Index p) const {
  if (p < 1) throw Error(ErrorKind::config, "dimension must be positive");
  if (!(scale > 0.0)) throw Error(ErrorKind::config, "covariance scale must be positive");
  Matrix s(p, p);
  switch (kind) {
    case Kind::identity:
      s.setIdentity();
      break;
    case Kind::compound_symmetry: {
      const double floor = p > 1 ? -1.0 / static_cast<double>(p - 1) : -1.0;
      if (!(rho > floor && rho < 1.0))
        throw Error(ErrorKind::config, "compound symmetry needs -1/(p-1) < rho < 1");
      s.setConstant(rho);
      s.diagonal().setOnes();
      break;
    }
    case Kind::ar1:
      if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::config, "AR(1) needs |rho| < 1");
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
      break;
    case Kind::diagonal_ramp:
      if (!(lo > 0.0 && hi > 0.0)) throw Error(ErrorKind::config, "diagonal ramp needs lo, hi > 0");
      s.setZero();
      for (Index i = 0; i < p; ++i)
        s(i, i) = p > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(p - 1) : lo;
      break;
  }
  return scale * s;
}

std::string CovarianceSpec::name() const {
  std::string base;
  switch (kind) {
    case Kind::identity: base = "identity"; break;
    case Kind::compound_symmetry: base = "compound_symmetry(" + format_number(rho) + ")"; break;
    case Kind::ar1: base = "ar1(" + format_number(rho) + ")"; break;
    case Kind::diagonal_ramp:
      base = "diagonal_ramp(" + format_number(lo) + "," + format_number(hi) + ")";
      break;
  }
  return scale == 1.0 ? base : format_number(scale) + "*" + base;
}

CovarianceFactor::CovarianceFactor(const CovarianceSpec& spec, Index p) : sigma_(spec.matrix(p)) {
  if (spec.kind == CovarianceSpec::Kind::identity) {
    scaled_identity_ = true;
    root_scale_ = std::sqrt(spec.scale);
    root_ = root_scale_ * Matrix::Identity(p, p);
    return;
  }
  try {
    root_ = sqrt_spd(sigma_, "covariance");
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.message());
  }
}

void CovarianceFactor::apply(Matrix& rows) const {
  if (scaled_identity_) {
    if (root_scale_ != 1.0) rows *= root_scale_;
    return;
  }
  rows = (rows * root_).eval();
}

// ---------------------------------------------------------------------------
// Random streams

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Matrix sample_errors(const ErrorDistribution& dist, Index n, Index p, std::mt19937_64& rng) {
  dist.validate();
  Matrix z(n, p);
  switch (dist.kind) {
    case ErrorDistribution::Kind::gaussian: {
      std::normal_distribution<double> normal;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
      break;
    }
    case ErrorDistribution::Kind::elliptical_t: {
      // z = g * sqrt((df - 2) / W), W ~ chi^2_df shared by the whole row.
      std::normal_distribution<double> normal;
      std::chi_squared_distribution<double> chi(dist.parameter);
      for (Index i = 0; i < n; ++i) {
        const double radial = std::sqrt((dist.parameter - 2.0) / chi(rng));
        for (Index j = 0; j < p; ++j) z(i, j) = radial * normal(rng);
      }
      break;
    }
    case ErrorDistribution::Kind::standardized_gamma: {
      std::gamma_distribution<double> gamma(dist.parameter, 1.0);
      const double shift = dist.parameter, inv_sd = 1.0 / std::sqrt(dist.parameter);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = (gamma(rng) - shift) * inv_sd;
      break;
    }
    case ErrorDistribution::Kind::rademacher: {
      std::bernoulli_distribution coin(0.5);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) z(i, j) = coin(rng) ? 1.0 : -1.0;
      break;
    }
  }
  return z;
}

Matrix sample_errors(const ErrorDistribution& dist, Index n, Index p, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  return sample_errors(dist, n, p, rng);
}

// ---------------------------------------------------------------------------
// Data generation

DataGenerator::DataGenerator(const DesignSpec& design, Matrix theta, std::vector<GroupErrors> groups)
    : sizes_(design.group_sizes), theta_(std::move(theta)), groups_(std::move(groups)) {
  if (theta_.rows() != design.between_rank() || theta_.cols() != design.within_rank())
    throw Error(ErrorKind::config, "Theta must be " + std::to_string(design.between_rank()) + "x" +
                                       std::to_string(design.within_rank()));
  if (groups_.size() != sizes_.size())
    throw Error(ErrorKind::config, "need " + std::to_string(sizes_.size()) +
                                       " group error specs, got " + std::to_string(groups_.size()));
  mean_ = design.between * theta_ * design.within.transpose();
  factors_.reserve(groups_.size());
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    try {
      groups_[i].distribution.validate();
      factors_.emplace_back(groups_[i].covariance, design.dimension());
    } catch (const Error& e) {
      throw Error(ErrorKind::config, e.message(), i);
    }
  }
}

Matrix DataGenerator::draw(std::mt19937_64& rng) const {
  Matrix x = mean_;
  Index row = 0;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    Matrix e = sample_errors(groups_[i].distribution, sizes_[i], mean_.cols(), rng);
    factors_[i].apply(e);
    x.middleRows(row, sizes_[i]) += e;
    row += sizes_[i];
  }
  return x;
}

GroupedSample DataGenerator::draw_sample(std::mt19937_64& rng) const {
  return GroupedSample{draw(rng), sizes_};
}

MeanModel DataGenerator::model() const {
  MeanModel m;
  m.theta = theta_;
  for (const auto& f : factors_) m.sigmas.push_back(f.sigma());
  return m;
}

double DataGenerator::fourth_moment() const {
  double out = 0.0;
  for (const auto& g : groups_) out = std::max(out, g.distribution.fourth_moment());
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GMANOVA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<ReplicationResult> run_replications(const MonteCarloConfig& config,
                                                const TestPlan& plan) {
  const DataGenerator generator(plan.design(), config.theta, config.groups);
  const ProjectionSet& proj = plan.projections();
  std::vector<ReplicationResult> results(config.reps);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= config.reps) return;
      try {
        auto rng = substream(config.seed, j);
        const Matrix compressed = compress(generator.draw(rng), proj);
        ReplicationResult& r = results[j];
        r.t = statistic_t_compressed(compressed, proj.omega);
        VarianceEstimate v = estimate_variance(compressed, plan.groups(), plan.omega_block_weights());
        r.sigma0_hat = v.sigma0_hat;
        const TestDecision d = decide(r.t, r.sigma0_hat, config.alpha);
        r.z = d.z;
        r.reject = d.reject;
        r.degenerate = d.degenerate;
        r.a2_hat = std::move(v.a2_hat);
        r.b_hat = std::move(v.b_hat);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(
              e.with_context("replication " + std::to_string(j)));
        next.store(config.reps);
        return;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.reps);
        return;
      }
    }
  };

  const unsigned threads =
      std::min<unsigned>(resolve_threads(config.threads),
                         static_cast<unsigned>(std::max<std::size_t>(1, config.reps)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

double ks_distance_normal(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

SimulationSummary summarize(const std::vector<ReplicationResult>& results,
                            const ModelFunctionals& truth, double alpha, std::uint64_t seed) {
  SimulationSummary s;
  s.replications = results.size();
  s.seed = seed;
  s.alpha = alpha;
  s.q = truth.q;
  s.sigma2 = truth.sigma2;
  s.sigma0_sq = truth.sigma0_sq;
  s.predicted_power = truth.sigma2 > 0.0 ? asymptotic_power(truth.q, truth.sigma2, truth.sigma0_sq, alpha)
                                         : alpha;
  if (results.empty()) return s;

  // Sums run in replication order, so the summary is independent of threading.
  std::vector<double> z;
  z.reserve(results.size());
  double z_sum = 0.0, t_sum = 0.0;
  for (const auto& r : results) {
    s.rejections += r.reject ? 1 : 0;
    s.degenerate += r.degenerate ? 1 : 0;
    z_sum += r.z;
    t_sum += r.t;
    z.push_back(r.z);
  }
  const double n = static_cast<double>(results.size());
  s.rejection_rate = static_cast<double>(s.rejections) / n;
  s.mc_standard_error = std::sqrt(s.rejection_rate * (1.0 - s.rejection_rate) / n);
  s.z_mean = z_sum / n;
  s.t_mean = t_sum / n;
  double ss = 0.0;
  for (double v : z) ss += (v - s.z_mean) * (v - s.z_mean);
  s.z_variance = results.size() > 1 ? ss / (n - 1.0) : 0.0;
  s.ks_distance = ks_distance_normal(std::move(z));
  return s;
}

SimulationSummary monte_carlo(const MonteCarloConfig& config) {
  if (config.reps < 100) throw Error(ErrorKind::config, "need at least 100 replications");
  const TestPlan plan(config.scenario.design);
  const DataGenerator generator(plan.design(), config.theta, config.groups);
  const ModelFunctionals truth = sigma_full(generator.model(), plan);
  return summarize(run_replications(config, plan), truth, config.alpha, config.seed);
}

Matrix default_signal_direction(const DesignSpec& design) {
  Matrix theta = Matrix::Zero(design.between_rank(), design.within_rank());
  const Index q = design.within_rank();
  for (Index j = 0; j < q; ++j)
    theta(0, j) = static_cast<double>(j + 1) / static_cast<double>(q);
  return theta;
}

Matrix theta_for_signal_ratio(const TestPlan& plan, const Matrix& direction,
                              const std::vector<Matrix>& sigmas, double ratio) {
  if (!(ratio >= 0.0)) throw Error(ErrorKind::config, "signal ratio must be non-negative");
  if (ratio == 0.0) return Matrix::Zero(direction.rows(), direction.cols());
  // 𝒬 and the linear variance term scale with c², σ₀² does not:
  // ratio² (σ₀² + u s₁) = u² q₀² with u = c².
  const ModelFunctionals unit = sigma_full(MeanModel{direction, sigmas}, plan);
  const double q0 = unit.q;
  const double s1 = unit.sigma2 - unit.sigma0_sq;
  if (!(q0 > 0.0)) throw Error(ErrorKind::config, "signal direction satisfies the null hypothesis");
  const double r2 = ratio * ratio;
  const double u = (r2 * s1 + std::sqrt(r2 * r2 * s1 * s1 + 4.0 * q0 * q0 * r2 * unit.sigma0_sq)) /
                   (2.0 * q0 * q0);
  return std::sqrt(u) * direction;
}

}  // namespace gmanova
