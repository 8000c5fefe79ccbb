// gmanova: bias-corrected trace test for L Θ R' = O in high-dimensional
// heteroscedastic GMANOVA models.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmanova/gmanova.hpp"
#include "gmanova/io.hpp"
#include "gmanova/oracle.hpp"

namespace {

using namespace gmanova;
namespace fs = std::filesystem;

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kInputError = 2,
  kNoBalancing = 3,
  kDegenerate = 4,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::no_balancing_solution: return kNoBalancing;
    case ErrorKind::internal: return kCheckFailed;
    default: return kInputError;
  }
}

std::vector<Index> parse_groups(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::input, "--groups: '" + item + "' is not an integer");
    }
  }
  return out;
}

struct ScenarioOptions {
  std::string name = "one-way";
  Index degree = 1;
  Index levels_a = 0;
  Index levels_b = 0;
  std::string effect = "interaction";
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opts) {
  cmd->add_option("--degree", opts.degree, "polynomial degree for growth-curve");
  cmd->add_option("--levels-a", opts.levels_a, "levels of factor A (two-way)");
  cmd->add_option("--levels-b", opts.levels_b, "levels of factor B (two-way)");
  cmd->add_option("--effect", opts.effect, "main_a | main_b | interaction (two-way)");
}

ScenarioRequest make_request(const ScenarioOptions& opts, std::vector<Index> groups, Index p) {
  ScenarioRequest req;
  req.name = opts.name;
  req.group_sizes = std::move(groups);
  req.p = p;
  req.degree = opts.degree;
  req.levels_a = opts.levels_a;
  req.levels_b = opts.levels_b;
  req.effect = parse_effect(opts.effect);
  return req;
}

// ------------------------------------------------------------------- test

struct TestOptions {
  std::string data;
  std::string design;
  std::string out;
  double alpha = 0.05;
  bool header = false;
  bool diagnostics = false;
  ScenarioOptions scenario;
};

int run_test_command(const TestOptions& opts) {
  const io::LabeledSample data = io::load_dataset(opts.data, opts.header);
  DesignSpec design;
  std::string scenario_name;
  if (!opts.design.empty()) {
    design = io::load_design(opts.design);
    io::check_design_matches(design, data.sample, opts.design);
    scenario_name = "custom";
  } else {
    for (std::size_t i = 0; i < data.labels.size(); ++i)
      if (data.sample.group_sizes[i] < 4)
        throw Error(ErrorKind::input,
                    opts.data + ": group '" + data.labels[i] + "' has " +
                        std::to_string(data.sample.group_sizes[i]) +
                        " rows; the " + opts.scenario.name + " test needs at least 4",
                    i);
    design = make_scenario(make_request(opts.scenario, data.sample.group_sizes, data.sample.x.cols()))
                 .design;
    scenario_name = opts.scenario.name;
  }

  const TestReport report = run_test(data.sample, design, opts.alpha, opts.diagnostics);

  nlohmann::json hashed = {{"data", opts.data},       {"design", opts.design},
                           {"scenario", scenario_name}, {"alpha", opts.alpha},
                           {"header", opts.header},   {"diagnostics", opts.diagnostics}};
  io::ReportContext ctx{scenario_name, io::config_hash(hashed), data.labels};

  std::printf("T            = %.10g\n", report.t_stat);
  std::printf("sigma0_hat^2 = %.10g\n", report.sigma0_hat);
  std::printf("z            = %.10g\n", report.z);
  std::printf("p-value      = %.6g\n", report.p_value);
  std::printf("decision     = %s at alpha = %g%s\n", report.reject ? "reject H0" : "retain H0",
              report.alpha, report.degenerate ? " (degenerate variance estimate)" : "");
  if (report.diagnostics) {
    const auto& d = *report.diagnostics;
    std::printf("diagnostics  : rho_N = %.6g, A2 ratio = %.6g, N imbalance = %.4g (plug-in, heuristic)\n",
                d.rho_n, d.a2_ratio, d.size_imbalance);
  }
  if (!opts.out.empty()) io::write_report(report, ctx, opts.out);
  return report.degenerate ? kDegenerate : kSuccess;
}

// --------------------------------------------------------------- simulate

int run_simulate_command(const std::string& config_path, const std::string& out) {
  const io::ExperimentConfig config = io::load_experiment_config(config_path);
  const SimulationSummary s = monte_carlo(io::to_monte_carlo(config));
  std::printf("scenario        %s\n", config.scenario.name.c_str());
  std::printf("replications    %zu (seed %llu)\n", s.replications,
              static_cast<unsigned long long>(s.seed));
  std::printf("rejection rate  %.4f +/- %.4f (alpha %.3g)\n", s.rejection_rate,
              s.mc_standard_error, s.alpha);
  std::printf("predicted power %.4f\n", s.predicted_power);
  std::printf("z mean / var    %.4f / %.4f\n", s.z_mean, s.z_variance);
  std::printf("KS(z, N(0,1))   %.4f\n", s.ks_distance);
  if (s.degenerate) std::printf("degenerate      %zu replications\n", s.degenerate);

  const nlohmann::json summary = io::summary_to_json(s, config.scenario.name, config.hash);
  if (!out.empty()) {
    io::write_json(summary, out);
  } else if (config.output) {
    io::write_json(summary, *config.output);
  }
  return kSuccess;
}

// --------------------------------------------------------------- diagnose

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

bool is_block_indicator(const DesignSpec& d) {
  if (d.between_rank() != d.groups()) return false;
  Index row = 0;
  for (Index i = 0; i < d.groups(); ++i)
    for (Index j = 0; j < d.group_sizes[static_cast<std::size_t>(i)]; ++j, ++row)
      for (Index c = 0; c < d.between_rank(); ++c)
        if (d.between(row, c) != (c == i ? 1.0 : 0.0)) return false;
  return true;
}

int run_diagnose_command(const std::string& config_path) {
  const io::ExperimentConfig config = io::load_experiment_config(config_path);
  const MonteCarloConfig mc = io::to_monte_carlo(config);
  const DesignSpec& design = mc.scenario.design;
  const TestPlan plan(design);
  const ProjectionSet& proj = plan.projections();
  const Index n = design.observations();
  std::vector<CheckRow> rows;
  auto add = [&](std::string name, double value, double tol) {
    rows.push_back({std::move(name), value, tol, value <= tol});
  };

  const Matrix& omega = proj.omega;
  add("Omega symmetric (max |O - O'|)", (omega - omega.transpose()).cwiseAbs().maxCoeff(), 0.0);
  add("Omega zero diagonal (max |O_ii|)", omega.diagonal().cwiseAbs().maxCoeff(), 0.0);
  const Matrix resid = Matrix::Identity(n, n) - proj.pi_a;
  add("Omega = Pi_H - (I-Pi_A)D(I-Pi_A)",
      (omega - (proj.pi_h - resid * proj.weights.asDiagonal() * resid)).cwiseAbs().maxCoeff(), 1e-8);
  add("Pi_A idempotent", (proj.pi_a * proj.pi_a - proj.pi_a).cwiseAbs().maxCoeff(), 1e-10);
  add("tr(Pi_H) = l", std::abs(proj.pi_h.trace() - static_cast<double>(design.row_rank())), 1e-8);
  add("tr(P'P) = r",
      std::abs((proj.compressor.transpose() * proj.compressor).trace() -
               static_cast<double>(design.column_rank())),
      1e-8);

  const oracle::MinNormSolution dense = oracle::balancing_weights(design);
  add("d vs dense SVD solve (max abs diff)", (dense.solution - proj.weights).cwiseAbs().maxCoeff(), 1e-8);

  const DataGenerator generator(design, mc.theta, mc.groups);
  auto rng = substream(mc.seed, 0);
  const GroupedSample sample = generator.draw_sample(rng);
  const double t_main = statistic_t(sample.x, proj.compressor, omega);
  const double t_dense = oracle::t_by_decomposition(sample.x, design);
  add("T vs decomposition (relative)",
      std::abs(t_main - t_dense) / std::max({std::abs(t_main), std::abs(t_dense), 1e-300}), 1e-8);

  if (is_block_indicator(design)) {
    const VarianceEstimate v =
        estimate_variance(compress(sample.x, proj), plan.groups(), plan.omega_block_weights());
    double worst_closed = 0.0, worst_perm = 0.0;
    bool perm_done = false;
    for (Index i = 0; i < design.groups(); ++i) {
      const Matrix x_i = sample.block(i) * proj.compressor.transpose();
      const double closed = oracle::a2_hat_one_way_closed_form(x_i);
      worst_closed = std::max(worst_closed, std::abs(v.a2_hat(i) - closed) / std::abs(closed));
      if (x_i.rows() <= 7) {
        perm_done = true;
        const double perm = oracle::a2_hat_permutation(x_i);
        worst_perm = std::max(worst_perm, std::abs(closed - perm) / std::abs(perm));
      }
    }
    add("a2_hat general vs one-way closed form", worst_closed, 1e-9);
    if (perm_done) add("a2_hat closed form vs permutation form", worst_perm, 1e-9);
  }

  bool all = true;
  std::printf("%-44s %14s %10s  %s\n", "check", "value", "tolerance", "result");
  for (const auto& r : rows) {
    std::printf("%-44s %14.3e %10.1e  %s\n", r.name.c_str(), r.value, r.tolerance,
                r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }
  return all ? kSuccess : kCheckFailed;
}

// --------------------------------------------------------------- scenario

int run_scenario_command(const ScenarioOptions& opts, const std::string& groups, Index p,
                         const std::string& emit) {
  const Scenario s = make_scenario(make_request(opts, parse_groups(groups), p));
  validate_design(s.design);
  std::printf("scenario  %s\nnull      %s\nN = %ld, k = %ld, p = %ld, q = %ld, l = %ld, r = %ld\n",
              s.name.c_str(), s.null_hypothesis.c_str(), static_cast<long>(s.design.observations()),
              static_cast<long>(s.design.between_rank()), static_cast<long>(s.design.dimension()),
              static_cast<long>(s.design.within_rank()), static_cast<long>(s.design.row_rank()),
              static_cast<long>(s.design.column_rank()));
  if (!emit.empty()) {
    const fs::path manifest = io::emit_design(s.design, emit);
    std::printf("wrote     %s\n", manifest.string().c_str());
  }
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional heteroscedastic GMANOVA trace test"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gmanova::kVersion));

  TestOptions test_opts;
  auto* test_cmd = app.add_subcommand("test", "run the test on a grouped CSV data set");
  test_cmd->add_option("--data", test_opts.data, "grouped CSV: label, x_1, ..., x_p")->required();
  test_cmd->add_option("--scenario", test_opts.scenario.name,
                       "one-way | two-way | parallelism | growth-curve");
  test_cmd->add_option("--design", test_opts.design, "design manifest JSON (overrides --scenario)");
  test_cmd->add_option("--alpha", test_opts.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  test_cmd->add_flag("--header", test_opts.header, "data file has a header row");
  test_cmd->add_flag("--diagnostics", test_opts.diagnostics, "report plug-in assumption diagnostics");
  test_cmd->add_option("--out", test_opts.out, "write the JSON report here");
  add_scenario_options(test_cmd, test_opts.scenario);

  std::string sim_config, sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo size / power experiment");
  sim_cmd->add_option("--config", sim_config, "experiment JSON")->required();
  sim_cmd->add_option("--out", sim_out, "write the JSON summary here");

  std::string diag_config;
  auto* diag_cmd = app.add_subcommand("diagnose", "oracle cross-checks for an experiment config");
  diag_cmd->add_option("--config", diag_config, "experiment JSON")->required();

  ScenarioOptions scen_opts;
  std::string scen_groups, scen_emit;
  Index scen_p = 0;
  auto* scen_cmd = app.add_subcommand("scenario", "materialize the design matrices of a scenario");
  scen_cmd->add_option("--name", scen_opts.name, "one-way | two-way | parallelism | growth-curve")->required();
  scen_cmd->add_option("--groups", scen_groups, "comma-separated group (or cell) sizes")->required();
  scen_cmd->add_option("--p", scen_p, "dimension")->required();
  scen_cmd->add_option("--emit", scen_emit, "directory for A.csv, B.csv, L.csv, R.csv, design.json");
  add_scenario_options(scen_cmd, scen_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*test_cmd) return run_test_command(test_opts);
    if (*sim_cmd) return run_simulate_command(sim_config, sim_out);
    if (*diag_cmd) return run_diagnose_command(diag_config);
    if (*scen_cmd) return run_scenario_command(scen_opts, scen_groups, scen_p, scen_emit);
  } catch (const gmanova::Error& e) {
    std::cerr << "gmanova: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gmanova: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
