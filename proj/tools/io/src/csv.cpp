#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gmanova/error.hpp"
#include "gmanova/io.hpp"

namespace gmanova::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  return path.string() + ": row " + std::to_string(line) + ", column " + std::to_string(column);
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line,
                    std::size_t column) {
  if (field.empty()) throw Error(ErrorKind::input, where(path, line, column) + ": missing value");
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::input, where(path, line, column) + ": '" + field + "' is not numeric");
  if (!std::isfinite(value))
    throw Error(ErrorKind::input, where(path, line, column) + ": value is not finite");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, path.string() + ": cannot open file");
  return in;
}

}  // namespace

LabeledSample load_dataset(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;

  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> label_index;
  std::vector<std::vector<std::vector<double>>> rows_by_group;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (has_header && line_no == 1) continue;
    const auto fields = split_fields(line);
    if (width == 0) {
      if (fields.size() < 2)
        throw Error(ErrorKind::input, path.string() + ": row " + std::to_string(line_no) +
                                          " needs a label and at least one value");
      width = fields.size();
    } else if (fields.size() != width) {
      throw Error(ErrorKind::input, path.string() + ": row " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " columns, expected " +
                                        std::to_string(width));
    }
    if (fields[0].empty())
      throw Error(ErrorKind::input, where(path, line_no, 1) + ": missing group label");

    std::vector<double> values(width - 1);
    for (std::size_t c = 1; c < width; ++c) values[c - 1] = parse_number(fields[c], path, line_no, c + 1);

    auto [it, inserted] = label_index.emplace(fields[0], labels.size());
    if (inserted) {
      labels.push_back(fields[0]);
      rows_by_group.emplace_back();
    }
    rows_by_group[it->second].push_back(std::move(values));
  }
  if (labels.empty()) throw Error(ErrorKind::input, path.string() + ": no data rows");

  LabeledSample out;
  out.labels = labels;
  Index n = 0;
  for (const auto& g : rows_by_group) {
    out.sample.group_sizes.push_back(static_cast<Index>(g.size()));
    n += static_cast<Index>(g.size());
  }
  out.sample.x.resize(n, static_cast<Index>(width - 1));
  Index row = 0;
  for (const auto& g : rows_by_group)
    for (const auto& values : g) {
      for (std::size_t c = 0; c < values.size(); ++c) out.sample.x(row, static_cast<Index>(c)) = values[c];
      ++row;
    }
  return out;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!rows.empty() && fields.size() != rows.front().size())
      throw Error(ErrorKind::input, path.string() + ": row " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " columns, expected " +
                                        std::to_string(rows.front().size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) values[c] = parse_number(fields[c], path, line_no, c + 1);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorKind::input, path.string() + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, path.string() + ": cannot open for writing");
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace gmanova::io
