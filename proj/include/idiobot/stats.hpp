#pragma once

#include <span>

namespace idiobot {

double mean(std::span<const double> xs);
/// Unbiased sample variance (n - 1 denominator). Requires n >= 2.
double sample_variance(std::span<const double> xs);

/// One-tailed Welch t-test of mean(a) < mean(b). Returns the confidence
/// level (1 - p) * 100. Both samples need at least two values. When both
/// variances are zero the level is 50 for equal means, otherwise 0 or 100.
double t_test_one_tailed(std::span<const double> a, std::span<const double> b);

}  // namespace idiobot
