#include <gtest/gtest.h>

#include <cmath>

#include "gmanova/normal.hpp"

namespace gmanova {
namespace {

struct QuantileCase {
  double p;
  double expected;
};

TEST(NormalQuantile, MatchesReferenceValues) {
  const QuantileCase cases[] = {
      {0.95, 1.6448536269514722},     {0.975, 1.959963984540054},
      {0.05, -1.6448536269514729},    {0.001, -3.090232306167813},
      {1e-10, -6.361340902404056},    {1e-20, -9.262340089798409},
      {1e-300, -37.0470962993612},    {0.3, -0.5244005127080409},
      {1.0 - 1e-10, 6.361340889697422},
  };
  for (const auto& c : cases)
    EXPECT_NEAR(normal_quantile(c.p), c.expected, 1e-12 * std::max(1.0, std::abs(c.expected)))
        << "p = " << c.p;
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p = 0.001; p < 1.0; p += 0.0137)
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13);
}

TEST(NormalCdf, TailsAndSymmetry) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_upper_tail(1.6448536269514722), 0.05, 1e-15);
  for (double x = -8.0; x <= 8.0; x += 0.5)
    EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15);
  EXPECT_GT(normal_upper_tail(30.0), 0.0);
}

TEST(NormalQuantile, OutsideUnitIntervalIsNotFinite) {
  EXPECT_EQ(normal_quantile(0.0), -INFINITY);
  EXPECT_EQ(normal_quantile(1.0), INFINITY);
  EXPECT_TRUE(std::isnan(normal_quantile(1.5)));
}

}  // namespace
}  // namespace gmanova
