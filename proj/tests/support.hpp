#pragma once

#include <random>
#include <string>
#include <vector>

#include "gmanova/gmanova.hpp"

namespace gmanova::testing {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

inline GroupedSample random_sample(const DesignSpec& d, std::mt19937_64& rng) {
  return {random_matrix(d.observations(), d.dimension(), rng), d.group_sizes};
}

// One of the four named layouts with random sizes, chosen by `which`.
inline Scenario random_scenario(int which, std::mt19937_64& rng, Index max_p = 100) {
  std::uniform_int_distribution<Index> size(4, 12);
  std::uniform_int_distribution<Index> dim(3, max_p);
  std::uniform_int_distribution<int> groups(2, 4);
  std::vector<Index> sizes(static_cast<std::size_t>(groups(rng)));
  for (auto& s : sizes) s = size(rng);
  const Index p = dim(rng);
  switch (which % 4) {
    case 0: return one_way_manova(sizes, p);
    case 1: return profile_parallelism(sizes, std::max<Index>(p, 2));
    case 2: return growth_curve(sizes, std::max<Index>(p, 4), std::min<Index>(3, p - 1));
    default: {
      std::vector<Index> cells(6);
      for (auto& s : cells) s = size(rng);
      const TwoWayEffect effect = static_cast<TwoWayEffect>(rng() % 3);
      return two_way_manova(2, 3, cells, p, effect);
    }
  }
}

}  // namespace gmanova::testing
