#pragma once

namespace gmanova {

/// Standard normal CDF Φ(x).
double normal_cdf(double x);

/// 1 - Φ(x), evaluated without cancellation for large x.
double normal_upper_tail(double x);

/// Φ^{-1}(p) for p in (0, 1); ±infinity at the endpoints, NaN outside.
/// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
double normal_quantile(double p);

}  // namespace gmanova
