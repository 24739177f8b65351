#pragma once

#include <cstddef>
#include <span>

namespace bebp {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance; 0 with fewer than two samples.
  double variance() const;
  double se_mean() const;
  Estimate mean_estimate() const { return {mean(), se_mean()}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

RunningStats summarize(std::span<const double> xs);

// Sample variance with a standard error from the fourth central moment.
Estimate variance_estimate(std::span<const double> xs);

}  // namespace bebp
