#include "gmanova/scenarios.hpp"

#include <string>

#include "gmanova/error.hpp"

namespace gmanova {

namespace {

Matrix group_indicators(const std::vector<Index>& sizes) {
  Index n = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= 0) throw Error(ErrorKind::design, "empty group", i);
    n += sizes[i];
  }
  Matrix a = Matrix::Zero(n, static_cast<Index>(sizes.size()));
  Index row = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    a.block(row, static_cast<Index>(i), sizes[i], 1).setOnes();
    row += sizes[i];
  }
  return a;
}

void require_groups(const std::vector<Index>& sizes, Index p) {
  if (sizes.size() < 2) throw Error(ErrorKind::design, "need at least two groups");
  if (p < 1) throw Error(ErrorKind::design, "dimension p must be positive");
}

}  // namespace

Matrix reference_contrast(Index levels) {
  Matrix c(levels - 1, levels);
  c.leftCols(levels - 1).setIdentity();
  c.col(levels - 1).setConstant(-1.0);
  return c;
}

Matrix first_differences(Index p) {
  Matrix r = Matrix::Zero(p - 1, p);
  for (Index j = 0; j + 1 < p; ++j) {
    r(j, j) = -1.0;
    r(j, j + 1) = 1.0;
  }
  return r;
}

Matrix polynomial_basis(Index p, Index degree) {
  if (degree < 0 || degree + 1 > p)
    throw Error(ErrorKind::design, "polynomial degree " + std::to_string(degree) +
                                       " needs degree + 1 <= p = " + std::to_string(p));
  // Centred, scaled time points keep the Vandermonde matrix well conditioned.
  Matrix v(p, degree + 1);
  const double mid = 0.5 * static_cast<double>(p + 1);
  const double half = p > 1 ? 0.5 * static_cast<double>(p - 1) : 1.0;
  for (Index t = 0; t < p; ++t) {
    const double x = (static_cast<double>(t + 1) - mid) / half;
    double power = 1.0;
    for (Index d = 0; d <= degree; ++d) {
      v(t, d) = power;
      power *= x;
    }
  }
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(p, degree + 1);
  // Fix signs so that the leading entry of R is positive in every column.
  const Matrix r = qr.matrixQR().topRows(degree + 1).triangularView<Eigen::Upper>();
  for (Index d = 0; d <= degree; ++d)
    if (r(d, d) < 0.0) q.col(d) *= -1.0;
  return q;
}

Scenario one_way_manova(const std::vector<Index>& group_sizes, Index p) {
  require_groups(group_sizes, p);
  const Index g = static_cast<Index>(group_sizes.size());
  Scenario s;
  s.name = "one-way";
  s.design.between = group_indicators(group_sizes);
  s.design.within = Matrix::Identity(p, p);
  s.design.row_contrast = reference_contrast(g);
  s.design.column_contrast = Matrix::Identity(p, p);
  s.design.group_sizes = group_sizes;
  s.null_hypothesis = "all " + std::to_string(g) + " group mean vectors are equal";
  return s;
}

Scenario two_way_manova(Index levels_a, Index levels_b, const std::vector<Index>& cell_sizes,
                        Index p, TwoWayEffect effect) {
  if (levels_a < 2 || levels_b < 2)
    throw Error(ErrorKind::design, "two-way layout needs at least two levels per factor");
  if (static_cast<Index>(cell_sizes.size()) != levels_a * levels_b)
    throw Error(ErrorKind::design, "expected " + std::to_string(levels_a * levels_b) +
                                       " cell sizes, got " + std::to_string(cell_sizes.size()));
  if (p < 1) throw Error(ErrorKind::design, "dimension p must be positive");

  const Matrix avg_a = Matrix::Constant(1, levels_a, 1.0 / static_cast<double>(levels_a));
  const Matrix avg_b = Matrix::Constant(1, levels_b, 1.0 / static_cast<double>(levels_b));
  const Matrix ca = reference_contrast(levels_a);
  const Matrix cb = reference_contrast(levels_b);
  auto kron = [](const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < x.cols(); ++j)
        out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };

  Scenario s;
  s.name = "two-way";
  s.design.between = group_indicators(cell_sizes);
  s.design.within = Matrix::Identity(p, p);
  s.design.column_contrast = Matrix::Identity(p, p);
  s.design.group_sizes = cell_sizes;
  switch (effect) {
    case TwoWayEffect::main_a:
      s.design.row_contrast = kron(ca, avg_b);
      s.null_hypothesis = "no main effect of factor A";
      break;
    case TwoWayEffect::main_b:
      s.design.row_contrast = kron(avg_a, cb);
      s.null_hypothesis = "no main effect of factor B";
      break;
    case TwoWayEffect::interaction:
      s.design.row_contrast = kron(ca, cb);
      s.null_hypothesis = "no A x B interaction";
      break;
  }
  return s;
}

Scenario profile_parallelism(const std::vector<Index>& group_sizes, Index p) {
  require_groups(group_sizes, p);
  if (p < 2) throw Error(ErrorKind::design, "profile parallelism needs p >= 2");
  Scenario s = one_way_manova(group_sizes, p);
  s.name = "parallelism";
  s.design.column_contrast = first_differences(p);
  s.null_hypothesis = "group mean profiles are parallel";
  return s;
}

Scenario growth_curve(const std::vector<Index>& group_sizes, Index p, Index degree) {
  require_groups(group_sizes, p);
  Scenario s = one_way_manova(group_sizes, p);
  s.name = "growth-curve";
  s.design.within = polynomial_basis(p, degree);
  s.design.column_contrast = Matrix::Identity(degree + 1, degree + 1);
  s.null_hypothesis = "groups share the same degree-" + std::to_string(degree) +
                      " growth-curve coefficients";
  return s;
}

TwoWayEffect parse_effect(const std::string& name) {
  if (name == "main_a" || name == "main-a") return TwoWayEffect::main_a;
  if (name == "main_b" || name == "main-b") return TwoWayEffect::main_b;
  if (name == "interaction") return TwoWayEffect::interaction;
  throw Error(ErrorKind::config, "unknown two-way effect '" + name + "'");
}

const char* to_string(TwoWayEffect effect) {
  switch (effect) {
    case TwoWayEffect::main_a: return "main_a";
    case TwoWayEffect::main_b: return "main_b";
    case TwoWayEffect::interaction: return "interaction";
  }
  return "interaction";
}

Scenario make_scenario(const ScenarioRequest& req) {
  if (req.name == "one-way") return one_way_manova(req.group_sizes, req.p);
  if (req.name == "parallelism") return profile_parallelism(req.group_sizes, req.p);
  if (req.name == "growth-curve") return growth_curve(req.group_sizes, req.p, req.degree);
  if (req.name == "two-way")
    return two_way_manova(req.levels_a, req.levels_b, req.group_sizes, req.p, req.effect);
  throw Error(ErrorKind::config, "unknown scenario '" + req.name +
                                     "' (expected one-way, two-way, parallelism, growth-curve)");
}

}  // namespace gmanova
