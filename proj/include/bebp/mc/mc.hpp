#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bebp/core/functional.hpp"
#include "bebp/core/rng.hpp"
#include "bebp/core/sample_space.hpp"
#include "bebp/core/stats.hpp"

namespace bebp {

struct Replication {
  std::vector<double> values;
  Estimate mean;
  Estimate variance;
};

// reps independent evaluations of a fresh functional on a fresh sample; value r
// uses only the streams of replication r.
Replication replicate(const FunctionalFactory& factory, const PointLaw& law, std::size_t n, std::size_t reps,
                      const SeedPolicy& seeds);

struct KolmogorovDistance {
  double value = 0.0;
  // Half-width of the 95% DKW band.
  double band = 0.0;
  std::size_t samples = 0;
};

double dkw_band(std::size_t samples, double level = 0.05);

// sup_t |ECDF(t) - Φ(t)|, after standardizing by the sample mean and sd when asked.
KolmogorovDistance empirical_kolmogorov(std::span<const double> sample, bool standardize);
// Same with a given centring and scale (plug-in σ).
KolmogorovDistance empirical_kolmogorov(std::span<const double> sample, double mean, double sd);

struct RatePoint {
  double n = 0.0;
  Estimate value;
  bool used = true;
};

struct RateFit {
  double exponent = 0.0;
  double exponent_se = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<RatePoint> points;
};

// Least squares of log value on log n. The smallest n is dropped when its
// relative se exceeds 25% and at least three sizes remain.
RateFit fit_rate(std::span<const double> ns, std::span<const Estimate> values);

struct ExperimentConfig {
  std::string functional;
  std::string distribution;
  std::vector<std::size_t> n_list;
  std::size_t reps = 1000;
  std::size_t k_inner = 8;
  std::size_t grid_m = 200000;
  std::uint64_t seed = 1;
  std::string output;

  // Throws InvalidArgument unless reps >= 30 and n_list is strictly increasing.
  void validate() const;
};

struct CsvRow {
  std::string experiment_id;
  std::size_t n = 0;
  std::string statistic;
  double value = 0.0;
  double se = 0.0;
};

// Header experiment_id,n,statistic,value,se; doubles in shortest round-trip form.
void write_csv(std::ostream& out, std::span<const CsvRow> rows);
std::string format_double(double x);

}  // namespace bebp
