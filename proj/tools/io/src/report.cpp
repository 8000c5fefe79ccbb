#include <cstdio>
#include <fstream>

#include "gmanova/error.hpp"
#include "gmanova/gmanova.hpp"
#include "gmanova/io.hpp"

namespace gmanova::io {

namespace {

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

nlohmann::json diagnostics_to_json(const DiagnosticsReport& d) {
  nlohmann::json j = {{"rho_n", d.rho_n},
                      {"a2_ratio", d.a2_ratio},
                      {"size_imbalance", d.size_imbalance},
                      {"heuristic", d.heuristic}};
  j["a3_ratio"] = d.a3_ratio ? nlohmann::json(*d.a3_ratio) : nlohmann::json(nullptr);
  j["d1_bound"] = d.d1_bound ? nlohmann::json(*d.d1_bound) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json report_to_json(const TestReport& r, const ReportContext& ctx) {
  nlohmann::json j = {{"tool", "gmanova"},
                      {"version", kVersion},
                      {"config_hash", ctx.config_hash},
                      {"scenario", ctx.scenario},
                      {"t_stat", r.t_stat},
                      {"sigma0_hat", r.sigma0_hat},
                      {"z", r.z},
                      {"p_value", r.p_value},
                      {"alpha", r.alpha},
                      {"reject", r.reject},
                      {"degenerate", r.degenerate},
                      {"a2_hat", to_json(r.a2_hat)},
                      {"b_hat", to_json(r.b_hat)},
                      {"groups", ctx.group_labels}};
  j["diagnostics"] = r.diagnostics ? diagnostics_to_json(*r.diagnostics) : nlohmann::json(nullptr);
  return j;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

void write_report(const TestReport& report, const ReportContext& context,
                  const std::filesystem::path& path) {
  write_json(report_to_json(report, context), path);
}

nlohmann::json summary_to_json(const SimulationSummary& s, const std::string& scenario,
                               const std::string& hash) {
  return {{"tool", "gmanova"},
          {"version", kVersion},
          {"config_hash", hash},
          {"scenario", scenario},
          {"replications", s.replications},
          {"rejections", s.rejections},
          {"degenerate", s.degenerate},
          {"rejection_rate", s.rejection_rate},
          {"mc_standard_error", s.mc_standard_error},
          {"z_mean", s.z_mean},
          {"z_variance", s.z_variance},
          {"ks_distance", s.ks_distance},
          {"t_mean", s.t_mean},
          {"q", s.q},
          {"sigma2", s.sigma2},
          {"sigma0_sq", s.sigma0_sq},
          {"predicted_power", s.predicted_power},
          {"alpha", s.alpha},
          {"seed", s.seed}};
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gmanova::io
