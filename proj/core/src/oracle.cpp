#include "gmanova/oracle.hpp"

#include <cmath>
#include <string>

#include "gmanova/error.hpp"

namespace gmanova::oracle {

namespace {

Matrix naive_multiply(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (Index j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix naive_transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix gauss_jordan_inverse(Matrix a) {
  const Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0) throw Error(ErrorKind::design, "oracle: singular matrix");
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double scale = 1.0 / a(col, col);
    for (Index j = 0; j < n; ++j) {
      a(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (Index j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Matrix inverse_square_root(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Matrix scaled = eig.eigenvectors();
  for (Index j = 0; j < scaled.cols(); ++j) scaled.col(j) /= std::sqrt(eig.eigenvalues()(j));
  return naive_multiply(scaled, naive_transpose(eig.eigenvectors()));
}

double trace_quadratic(const Matrix& y, const Matrix& k) {
  // tr(Y' K Y) = Σ_ij K_ij <y_i, y_j>
  double total = 0.0;
  for (Index i = 0; i < y.rows(); ++i)
    for (Index j = 0; j < y.rows(); ++j) {
      double dot = 0.0;
      for (Index c = 0; c < y.cols(); ++c) dot += y(i, c) * y(j, c);
      total += k(i, j) * dot;
    }
  return total;
}

struct DenseProjections {
  Matrix pi_a;
  Matrix pi_h;
  Matrix compressor;
};

DenseProjections dense_projections(const DesignSpec& d) {
  const Matrix at = naive_transpose(d.between);
  const Matrix gram_inv = gauss_jordan_inverse(naive_multiply(at, d.between));
  DenseProjections out;
  out.pi_a = naive_multiply(naive_multiply(d.between, gram_inv), at);

  const Matrix lt = naive_transpose(d.row_contrast);
  const Matrix left = naive_multiply(naive_multiply(d.between, gram_inv), lt);  // A(A'A)^-1 L'
  const Matrix middle =
      gauss_jordan_inverse(naive_multiply(naive_multiply(d.row_contrast, gram_inv), lt));
  out.pi_h = naive_multiply(naive_multiply(left, middle), naive_transpose(left));

  const Matrix bt = naive_transpose(d.within);
  const Matrix bgram_inv = gauss_jordan_inverse(naive_multiply(bt, d.within));
  const Matrix rb = naive_multiply(d.column_contrast, bgram_inv);
  const Matrix root = inverse_square_root(naive_multiply(rb, naive_transpose(d.column_contrast)));
  out.compressor = naive_multiply(naive_multiply(root, rb), bt);
  return out;
}

Matrix hadamard_square_residual(const Matrix& pi_a) {
  const Index n = pi_a.rows();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double v = (i == j ? 1.0 : 0.0) - pi_a(i, j);
      c(i, j) = v * v;
    }
  return c;
}

}  // namespace

MinNormSolution dense_min_norm_solve(const Matrix& coeff, const Vector& rhs) {
  Eigen::JacobiSVD<Matrix> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? 1e-10 * s(0) : 0.0;
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();

  Vector projected = Vector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (!(s(k) > cutoff)) continue;
    double dot = 0.0;
    for (Index i = 0; i < u.rows(); ++i) dot += u(i, k) * rhs(i);
    projected(k) = dot / s(k);
  }
  MinNormSolution out;
  out.solution = Vector::Zero(coeff.cols());
  for (Index i = 0; i < v.rows(); ++i)
    for (Index k = 0; k < s.size(); ++k) out.solution(i) += v(i, k) * projected(k);

  double resid_sq = 0.0, rhs_sq = 0.0;
  for (Index i = 0; i < coeff.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < coeff.cols(); ++j) row += coeff(i, j) * out.solution(j);
    resid_sq += (row - rhs(i)) * (row - rhs(i));
    rhs_sq += rhs(i) * rhs(i);
  }
  out.residual = std::sqrt(resid_sq);
  out.relative_residual = rhs_sq > 0.0 ? out.residual / std::sqrt(rhs_sq) : out.residual;
  return out;
}

MinNormSolution balancing_weights(const DesignSpec& design) {
  const DenseProjections proj = dense_projections(design);
  return dense_min_norm_solve(hadamard_square_residual(proj.pi_a), proj.pi_h.diagonal());
}

double t_by_decomposition(const Matrix& x, const DesignSpec& design) {
  const DenseProjections proj = dense_projections(design);
  const Index n = x.rows();
  const Vector d =
      dense_min_norm_solve(hadamard_square_residual(proj.pi_a), proj.pi_h.diagonal()).solution;

  const Matrix y = naive_multiply(x, naive_transpose(proj.compressor));  // N x r
  const double q_hat = trace_quadratic(y, proj.pi_h);

  Matrix residual_maker = -proj.pi_a;
  for (Index i = 0; i < n; ++i) residual_maker(i, i) += 1.0;
  Matrix weighted = residual_maker;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) weighted(i, j) *= d(j);
  const Matrix correction = naive_multiply(weighted, residual_maker);
  return q_hat - trace_quadratic(y, correction);
}

MomentEstimate mc_moment_oracle(const std::function<double(const GroupedSample&)>& estimator,
                                const DataGenerator& model, std::size_t reps, std::uint64_t seed) {
  MomentEstimate out;
  out.reps = reps;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < reps; ++j) {
    auto rng = substream(seed, j);
    const double v = estimator(model.draw_sample(rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  out.mean = mean;
  if (reps > 1)
    out.standard_error = std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps));
  return out;
}

double a2_hat_one_way_closed_form(const Matrix& x_i) {
  const Index n = x_i.rows(), p = x_i.cols();
  if (n < 4) throw Error(ErrorKind::estimator_undefined, "one-way closed form needs N_i >= 4");
  Vector mean = Vector::Zero(p);
  for (Index j = 0; j < n; ++j)
    for (Index c = 0; c < p; ++c) mean(c) += x_i(j, c);
  mean /= static_cast<double>(n);
  Matrix centred(n, p);
  for (Index j = 0; j < n; ++j)
    for (Index c = 0; c < p; ++c) centred(j, c) = x_i(j, c) - mean(c);

  const double dof = static_cast<double>(n - 1);
  double trace_s = 0.0, trace_s2 = 0.0, q = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index l = 0; l < n; ++l) {
      double dot = 0.0;
      for (Index c = 0; c < p; ++c) dot += centred(j, c) * centred(l, c);
      trace_s2 += dot * dot;
      if (j == l) {
        trace_s += dot;
        q += dot * dot;
      }
    }
  }
  trace_s /= dof;
  trace_s2 /= dof * dof;
  q /= dof;
  const double nn = static_cast<double>(n);
  return (nn - 1.0) / (nn * (nn - 2.0) * (nn - 3.0)) *
         ((nn - 1.0) * (nn - 2.0) * trace_s2 + trace_s * trace_s - nn * q);
}

double a2_hat_permutation(const Matrix& x_i) {
  const Index n = x_i.rows(), p = x_i.cols();
  if (n < 4) throw Error(ErrorKind::estimator_undefined, "permutation form needs N_i >= 4");
  double total = 0.0;
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l) {
      if (l == k) continue;
      for (Index a = 0; a < n; ++a) {
        if (a == k || a == l) continue;
        for (Index b = 0; b < n; ++b) {
          if (b == k || b == l || b == a) continue;
          double dot = 0.0;
          for (Index c = 0; c < p; ++c)
            dot += (x_i(k, c) - x_i(l, c)) * (x_i(a, c) - x_i(b, c));
          total += dot * dot / 4.0;
        }
      }
    }
  const double nn = static_cast<double>(n);
  return total / (nn * (nn - 1.0) * (nn - 2.0) * (nn - 3.0));
}

TauCoefficients one_way_tau(Index n) {
  const double nn = static_cast<double>(n);
  TauCoefficients t;
  t.first = (nn - 1.0) * (nn - 1.0) / nn;
  t.second = (nn - 1.0) * (nn * nn - 3.0 * nn + 3.0) / (nn * nn);
  t.third = (nn - 2.0) * (nn - 2.0) * (nn - 3.0) / nn;
  return t;
}

double two_sample_sigma0(Index n, Index p) {
  const double nn = static_cast<double>(n);
  return static_cast<double>(p) * (2.0 * nn - 1.0) / (nn - 1.0);
}

}  // namespace gmanova::oracle
