#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hgon/error.hpp"
#include "hgon/tensor.hpp"

namespace hgon {

/// ||theta_hat - theta_bar||_F^2 / ||theta_bar||_F^2.
inline double normalized_error(const ProbabilityTensor& theta_hat, const ProbabilityTensor& theta_bar) {
  const ProbabilityTensor zero(theta_bar.n(), theta_bar.m());
  const double denom = frobenius_sq_diff(theta_bar, zero);
  require(denom > 0.0, "degenerate target: theta_bar is identically zero");
  return frobenius_sq_diff(theta_hat, theta_bar) / denom;
}

struct TrialSummary {
  double mean = 0.0;
  /// Unbiased sample standard deviation over sqrt(n_trials).
  double std_error = 0.0;
  std::size_t n_trials = 0;
  std::vector<double> values;
};

inline TrialSummary aggregate(std::span<const double> values) {
  require(!values.empty(), "cannot aggregate an empty list of trials");
  require(values.size() >= 2, "standard error needs at least two trials");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  TrialSummary s;
  s.mean = std::clamp(mean, *std::ranges::min_element(values), *std::ranges::max_element(values));
  s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  s.n_trials = values.size();
  s.values.assign(values.begin(), values.end());
  return s;
}

}  // namespace hgon
