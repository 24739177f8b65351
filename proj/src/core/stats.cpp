#include "bebp/core/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bebp {

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::se_mean() const { return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_)); }

RunningStats summarize(std::span<const double> xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

Estimate variance_estimate(std::span<const double> xs) {
  const auto s = summarize(xs);
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 2) return {0.0, 0.0};
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean();
    m4 += d * d * d * d;
  }
  m4 /= n;
  const double v = s.variance();
  // Var(s^2) ≈ (μ4 - σ^4 (n-3)/(n-1)) / n
  const double var_v = (m4 - v * v * (n - 3.0) / (n - 1.0)) / n;
  return {v, std::sqrt(std::max(var_v, 0.0))};
}

}  // namespace bebp
