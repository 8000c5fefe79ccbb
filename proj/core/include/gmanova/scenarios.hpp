#pragma once

#include <string>
#include <vector>

#include "gmanova/design.hpp"

namespace gmanova {

struct Scenario {
  std::string name;
  DesignSpec design;
  std::string null_hypothesis;
};

/// A = diag(1_{N_1}, ..., 1_{N_g}), B = R = I_p, L = (I_{g-1} | -1_{g-1}).
Scenario one_way_manova(const std::vector<Index>& group_sizes, Index p);

enum class TwoWayEffect { main_a, main_b, interaction };

/// Cell-means coding. Cells are ordered with the second factor varying
/// fastest: cell (i, j) is column i * levels_b + j of A.
Scenario two_way_manova(Index levels_a, Index levels_b, const std::vector<Index>& cell_sizes,
                        Index p, TwoWayEffect effect);

/// One-way A and L; R = (p-1) x p first differences, null = parallel profiles.
Scenario profile_parallelism(const std::vector<Index>& group_sizes, Index p);

/// One-way A and L; B = orthonormal polynomial basis of the given degree on
/// time points 1..p; R = I. Null = equal growth-curve coefficients.
Scenario growth_curve(const std::vector<Index>& group_sizes, Index p, Index degree);

/// (I_{m-1} | -1_{m-1}), the last-level reference contrast.
Matrix reference_contrast(Index levels);
/// (p-1) x p matrix with rows e_{j+1} - e_j.
Matrix first_differences(Index p);
/// p x (degree+1) orthonormal polynomial basis.
Matrix polynomial_basis(Index p, Index degree);

/// Name-addressable construction used by the CLI and experiment configs.
struct ScenarioRequest {
  std::string name;  // one-way | two-way | parallelism | growth-curve
  std::vector<Index> group_sizes;
  Index p = 0;
  Index degree = 1;
  Index levels_a = 0;
  Index levels_b = 0;
  TwoWayEffect effect = TwoWayEffect::interaction;
};

Scenario make_scenario(const ScenarioRequest& request);
TwoWayEffect parse_effect(const std::string& name);
const char* to_string(TwoWayEffect effect);

}  // namespace gmanova
