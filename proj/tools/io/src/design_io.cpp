#include <fstream>

#include "gmanova/error.hpp"
#include "gmanova/io.hpp"
#include "json_util.hpp"

namespace gmanova::io {

namespace fs = std::filesystem;

DesignSpec load_design(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::input, manifest.string() + ": cannot open design manifest");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::input, manifest.string() + ": invalid JSON (" + e.what() + ")");
  }
  const std::string where = manifest.string();
  detail::reject_unknown_keys(j, {"A", "B", "L", "R", "group_sizes"}, where, ErrorKind::input);

  const fs::path base = manifest.parent_path();
  auto matrix = [&](const char* key) {
    return read_matrix_csv(base / detail::get_as<std::string>(j, key, where, ErrorKind::input));
  };
  DesignSpec d;
  d.between = matrix("A");
  d.within = matrix("B");
  d.row_contrast = matrix("L");
  d.column_contrast = matrix("R");
  for (long v : detail::get_as<std::vector<long>>(j, "group_sizes", where, ErrorKind::input))
    d.group_sizes.push_back(static_cast<Index>(v));
  try {
    validate_design(d);
  } catch (const Error& e) {
    throw e.with_context(where);
  }
  return d;
}

fs::path emit_design(const DesignSpec& design, const fs::path& dir) {
  fs::create_directories(dir);
  write_matrix_csv(design.between, dir / "A.csv");
  write_matrix_csv(design.within, dir / "B.csv");
  write_matrix_csv(design.row_contrast, dir / "L.csv");
  write_matrix_csv(design.column_contrast, dir / "R.csv");
  nlohmann::json j = {{"A", "A.csv"}, {"B", "B.csv"}, {"L", "L.csv"}, {"R", "R.csv"},
                      {"group_sizes", design.group_sizes}};
  const fs::path manifest = dir / "design.json";
  write_json(j, manifest);
  return manifest;
}

void check_design_matches(const DesignSpec& design, const GroupedSample& sample,
                          const std::string& source) {
  if (sample.x.cols() != design.dimension())
    throw Error(ErrorKind::input, source + ": data has p = " + std::to_string(sample.x.cols()) +
                                      " columns but B has p = " +
                                      std::to_string(design.dimension()) + " rows");
  if (sample.x.rows() != design.observations())
    throw Error(ErrorKind::input, source + ": data has N = " + std::to_string(sample.x.rows()) +
                                      " rows but A has N = " +
                                      std::to_string(design.observations()) + " rows");
  if (sample.group_sizes != design.group_sizes) {
    std::string have, want;
    for (auto v : sample.group_sizes) have += (have.empty() ? "" : ",") + std::to_string(v);
    for (auto v : design.group_sizes) want += (want.empty() ? "" : ",") + std::to_string(v);
    throw Error(ErrorKind::input,
                source + ": data group sizes (" + have + ") differ from design (" + want + ")");
  }
}

}  // namespace gmanova::io
