#pragma once

#include <cstdint>
#include <functional>

#include "gmanova/design.hpp"
#include "gmanova/estimators.hpp"
#include "gmanova/simulation.hpp"

/// Brute-force reference computations. Nothing here calls the matrix
/// products or projector code of the main pipeline; all products are plain
/// triple loops and every projection is rebuilt from scratch.
namespace gmanova::oracle {

/// Q̂ - tr(𝒫X'(I-Π_A)D(I-Π_A)X𝒫'), evaluated densely from the raw design.
double t_by_decomposition(const Matrix& x, const DesignSpec& design);

struct MinNormSolution {
  Vector solution;
  double residual = 0.0;           // ||C d - rhs||
  double relative_residual = 0.0;  // residual / ||rhs||
};

/// Full-SVD minimum-norm least squares. Never throws on inconsistency.
MinNormSolution dense_min_norm_solve(const Matrix& coeff, const Vector& rhs);

/// Balancing weights for `design` via dense_min_norm_solve.
MinNormSolution balancing_weights(const DesignSpec& design);

struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t reps = 0;
};

/// Replays `estimator` on `reps` independent draws of `model`.
MomentEstimate mc_moment_oracle(const std::function<double(const GroupedSample&)>& estimator,
                                const DataGenerator& model, std::size_t reps, std::uint64_t seed);

/// One-way closed form of the tr(Σ_i²) estimator from the group's rows, with
/// the group mean removed directly.
double a2_hat_one_way_closed_form(const Matrix& x_i);

/// (1/P_{n,4}) Σ over distinct (k, l, α, β) of {(x_k - x_l)'(x_α - x_β)}² / 4.
double a2_hat_permutation(const Matrix& x_i);

/// One-way τ coefficients: ((n-1)²/n, (n-1)(n²-3n+3)/n², (n-2)²(n-3)/n).
TauCoefficients one_way_tau(Index n);

/// σ₀² for two balanced groups of size n with Σ = I_p and 𝒫 = I: p(2n-1)/(n-1).
double two_sample_sigma0(Index n, Index p);

}  // namespace gmanova::oracle
