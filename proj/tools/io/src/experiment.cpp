#include <fstream>

#include "gmanova/error.hpp"
#include "gmanova/io.hpp"
#include "json_util.hpp"

namespace gmanova::io {

namespace fs = std::filesystem;
using nlohmann::json;

ErrorDistribution parse_distribution(const json& j) {
  const std::string where = "distribution";
  const auto kind = detail::get_as<std::string>(j, "kind", where);
  ErrorDistribution d;
  if (kind == "gaussian") {
    detail::reject_unknown_keys(j, {"kind"}, where);
    d = ErrorDistribution::gaussian();
  } else if (kind == "elliptical_t") {
    detail::reject_unknown_keys(j, {"kind", "df"}, where);
    d = ErrorDistribution::elliptical_t(detail::get_as<double>(j, "df", where));
  } else if (kind == "standardized_gamma") {
    detail::reject_unknown_keys(j, {"kind", "shape"}, where);
    d = ErrorDistribution::standardized_gamma(detail::get_as<double>(j, "shape", where));
  } else if (kind == "rademacher") {
    detail::reject_unknown_keys(j, {"kind"}, where);
    d = ErrorDistribution::rademacher();
  } else {
    throw Error(ErrorKind::config, where + ": unknown kind '" + kind + "'");
  }
  d.validate();
  return d;
}

CovarianceSpec parse_covariance(const json& j) {
  const std::string where = "covariance";
  const auto kind = detail::get_as<std::string>(j, "kind", where);
  const double scale = j.contains("scale") ? detail::get_as<double>(j, "scale", where) : 1.0;
  if (kind == "identity") {
    detail::reject_unknown_keys(j, {"kind", "scale"}, where);
    return CovarianceSpec::identity(scale);
  }
  if (kind == "compound_symmetry") {
    detail::reject_unknown_keys(j, {"kind", "rho", "scale"}, where);
    return CovarianceSpec::compound_symmetry(detail::get_as<double>(j, "rho", where), scale);
  }
  if (kind == "ar1") {
    detail::reject_unknown_keys(j, {"kind", "rho", "scale"}, where);
    return CovarianceSpec::ar1(detail::get_as<double>(j, "rho", where), scale);
  }
  if (kind == "diagonal_ramp") {
    detail::reject_unknown_keys(j, {"kind", "lo", "hi", "scale"}, where);
    return CovarianceSpec::diagonal_ramp(detail::get_as<double>(j, "lo", where),
                                         detail::get_as<double>(j, "hi", where), scale);
  }
  throw Error(ErrorKind::config, where + ": unknown kind '" + kind + "'");
}

namespace {

Scenario parse_scenario(const json& j) {
  const std::string where = "scenario";
  detail::reject_unknown_keys(j, {"name", "group_sizes", "p", "degree", "levels_a", "levels_b", "effect"},
                              where);
  ScenarioRequest req;
  req.name = detail::get_as<std::string>(j, "name", where);
  for (long v : detail::get_as<std::vector<long>>(j, "group_sizes", where))
    req.group_sizes.push_back(static_cast<Index>(v));
  req.p = detail::get_as<long>(j, "p", where);
  if (j.contains("degree")) req.degree = detail::get_as<long>(j, "degree", where);
  if (j.contains("levels_a")) req.levels_a = detail::get_as<long>(j, "levels_a", where);
  if (j.contains("levels_b")) req.levels_b = detail::get_as<long>(j, "levels_b", where);
  if (j.contains("effect")) req.effect = parse_effect(detail::get_as<std::string>(j, "effect", where));
  Scenario s = make_scenario(req);
  validate_design(s.design);
  return s;
}

template <typename T, typename Parse>
std::vector<T> per_group(const json& j, std::size_t groups, Parse parse, const char* what) {
  std::vector<T> out;
  if (j.is_array()) {
    if (j.size() != groups)
      throw Error(ErrorKind::config, std::string(what) + ": expected " + std::to_string(groups) +
                                         " entries, got " + std::to_string(j.size()));
    for (const auto& item : j) out.push_back(parse(item));
  } else {
    out.assign(groups, parse(j));
  }
  return out;
}

ThetaSpec parse_theta(const json& j, const fs::path& base) {
  const std::string where = "theta";
  const auto kind = detail::get_as<std::string>(j, "kind", where);
  ThetaSpec t;
  if (kind == "zero") {
    detail::reject_unknown_keys(j, {"kind"}, where);
  } else if (kind == "matrix") {
    detail::reject_unknown_keys(j, {"kind", "path"}, where);
    t.kind = ThetaSpec::Kind::matrix;
    t.matrix = read_matrix_csv(base / detail::get_as<std::string>(j, "path", where));
  } else if (kind == "signal_ray") {
    detail::reject_unknown_keys(j, {"kind", "magnitude", "ratio"}, where);
    t.kind = ThetaSpec::Kind::signal_ray;
    if (j.contains("magnitude")) t.magnitude = detail::get_as<double>(j, "magnitude", where);
    if (j.contains("ratio")) t.ratio = detail::get_as<double>(j, "ratio", where);
    if (t.magnitude.has_value() == t.ratio.has_value())
      throw Error(ErrorKind::config, where + ": signal_ray needs exactly one of magnitude, ratio");
  } else {
    throw Error(ErrorKind::config, where + ": unknown kind '" + kind + "'");
  }
  return t;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j, const fs::path& base_dir) {
  const std::string where = "experiment config";
  detail::reject_unknown_keys(j, {"scenario", "design", "distribution", "covariance", "theta",
                                  "alpha", "reps", "seed", "threads", "output"},
                              where);
  ExperimentConfig c;
  if (j.contains("scenario") == j.contains("design"))
    throw Error(ErrorKind::config, where + ": give exactly one of 'scenario' or 'design'");
  if (j.contains("scenario")) {
    c.scenario = parse_scenario(j.at("scenario"));
  } else {
    c.scenario.name = "custom";
    c.scenario.design = load_design(base_dir / detail::get_as<std::string>(j, "design", where));
    c.scenario.null_hypothesis = "L Theta R' = O for the supplied design";
  }
  const std::size_t g = c.scenario.design.group_sizes.size();

  const json dist = j.contains("distribution") ? j.at("distribution") : json{{"kind", "gaussian"}};
  const json cov = j.contains("covariance") ? j.at("covariance") : json{{"kind", "identity"}};
  const auto dists = per_group<ErrorDistribution>(dist, g, parse_distribution, "distribution");
  const auto covs = per_group<CovarianceSpec>(cov, g, parse_covariance, "covariance");
  for (std::size_t i = 0; i < g; ++i) c.groups.push_back({dists[i], covs[i]});

  c.theta = j.contains("theta") ? parse_theta(j.at("theta"), base_dir) : ThetaSpec{};
  if (j.contains("alpha")) c.alpha = detail::get_as<double>(j, "alpha", where);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error(ErrorKind::config, where + ": alpha must lie in (0, 1)");
  if (j.contains("reps")) c.reps = detail::get_as<std::size_t>(j, "reps", where);
  if (c.reps < 100) throw Error(ErrorKind::config, where + ": reps must be at least 100");
  if (j.contains("seed")) c.seed = detail::get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("threads")) c.threads = detail::get_as<unsigned>(j, "threads", where);
  if (j.contains("output")) c.output = base_dir / detail::get_as<std::string>(j, "output", where);
  c.hash = config_hash(j);
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, path.string() + ": cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path.string() + ": invalid JSON (" + e.what() + ")");
  }
  try {
    return parse_experiment_config(j, path.parent_path());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

MonteCarloConfig to_monte_carlo(const ExperimentConfig& c) {
  MonteCarloConfig mc;
  mc.scenario = c.scenario;
  mc.groups = c.groups;
  mc.alpha = c.alpha;
  mc.reps = c.reps;
  mc.seed = c.seed;
  mc.threads = c.threads;
  const DesignSpec& d = c.scenario.design;
  switch (c.theta.kind) {
    case ThetaSpec::Kind::zero:
      mc.theta = Matrix::Zero(d.between_rank(), d.within_rank());
      break;
    case ThetaSpec::Kind::matrix:
      if (c.theta.matrix.rows() != d.between_rank() || c.theta.matrix.cols() != d.within_rank())
        throw Error(ErrorKind::config, "theta matrix is " + std::to_string(c.theta.matrix.rows()) +
                                           "x" + std::to_string(c.theta.matrix.cols()) +
                                           " but the design needs " +
                                           std::to_string(d.between_rank()) + "x" +
                                           std::to_string(d.within_rank()));
      mc.theta = c.theta.matrix;
      break;
    case ThetaSpec::Kind::signal_ray: {
      const Matrix direction = default_signal_direction(d);
      if (c.theta.magnitude) {
        mc.theta = *c.theta.magnitude * direction;
      } else {
        const TestPlan plan(d);
        std::vector<Matrix> sigmas;
        for (const auto& g : c.groups) sigmas.push_back(g.covariance.matrix(d.dimension()));
        mc.theta = theta_for_signal_ratio(plan, direction, sigmas, *c.theta.ratio);
      }
      break;
    }
  }
  return mc;
}

}  // namespace gmanova::io
