#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmanova/estimators.hpp"
#include "gmanova/scenarios.hpp"
#include "gmanova/simulation.hpp"
#include "gmanova/test_engine.hpp"

namespace gmanova::io {

// ---------------------------------------------------------------- CSV data

struct LabeledSample {
  GroupedSample sample;
  std::vector<std::string> labels;  // group labels in first-appearance order
};

/// Grouped layout: column 1 is the group label, the remaining p columns are
/// numeric. Rows are regrouped contiguously in first-appearance label order.
/// Errors name the file, the 1-based line and the 1-based column.
LabeledSample load_dataset(const std::filesystem::path& path, bool has_header);

/// Dense numeric CSV without header.
Matrix read_matrix_csv(const std::filesystem::path& path);
/// Writes every entry with 17 significant digits.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

// ---------------------------------------------------------------- designs

/// JSON manifest {"A": file, "B": file, "L": file, "R": file, "group_sizes": [...]};
/// file names resolve relative to the manifest.
DesignSpec load_design(const std::filesystem::path& manifest);

/// Writes A.csv, B.csv, L.csv, R.csv and design.json into `dir`; returns the
/// manifest path.
std::filesystem::path emit_design(const DesignSpec& design, const std::filesystem::path& dir);

/// Throws ErrorKind::input naming both dimensions when data and design disagree.
void check_design_matches(const DesignSpec& design, const GroupedSample& sample,
                          const std::string& source);

// ---------------------------------------------------------------- reports

struct ReportContext {
  std::string scenario;
  std::string config_hash;
  std::vector<std::string> group_labels;
};

nlohmann::json report_to_json(const TestReport& report, const ReportContext& context);
void write_report(const TestReport& report, const ReportContext& context,
                  const std::filesystem::path& path);

nlohmann::json diagnostics_to_json(const DiagnosticsReport& d);
nlohmann::json summary_to_json(const SimulationSummary& s, const std::string& scenario,
                               const std::string& config_hash);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

// ---------------------------------------------------------------- experiments

struct ThetaSpec {
  enum class Kind { zero, matrix, signal_ray };
  Kind kind = Kind::zero;
  Matrix matrix;                    // Kind::matrix
  std::optional<double> magnitude;  // Kind::signal_ray, scale of the default direction
  std::optional<double> ratio;      // Kind::signal_ray, target 𝒬 / sqrt(σ²)
};

struct ExperimentConfig {
  Scenario scenario;
  std::vector<GroupErrors> groups;
  ThetaSpec theta;
  double alpha = 0.05;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<std::filesystem::path> output;
  std::string hash;
};

/// Schema-validates `j`; unknown keys are rejected with ErrorKind::config.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Resolves Θ and assembles the Monte Carlo configuration.
MonteCarloConfig to_monte_carlo(const ExperimentConfig& config);

ErrorDistribution parse_distribution(const nlohmann::json& j);
CovarianceSpec parse_covariance(const nlohmann::json& j);

}  // namespace gmanova::io
