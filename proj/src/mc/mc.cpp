#include "bebp/mc/mc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"
#include "bebp/stein/stein.hpp"

namespace bebp {

Replication replicate(const FunctionalFactory& factory, const PointLaw& law, std::size_t n, std::size_t reps,
                      const SeedPolicy& seeds) {
  Replication out;
  out.values.resize(reps);
  parallel_for(reps, [&](std::size_t r) {
    auto integration = seeds.stream(r, Role::Integration);
    auto sx = seeds.stream(r, Role::X);
    const auto f = factory(integration);
    out.values[r] = f->evaluate(law.sample(n, sx));
  });
  out.mean = summarize(out.values).mean_estimate();
  out.variance = variance_estimate(out.values);
  return out;
}

double dkw_band(std::size_t samples, double level) {
  return std::sqrt(std::log(2.0 / level) / (2.0 * static_cast<double>(samples)));
}

KolmogorovDistance empirical_kolmogorov(std::span<const double> sample, double mean, double sd) {
  require(sample.size() >= 100, ErrorCode::TooFewSamples, "empirical_kolmogorov needs at least 100 samples");
  require(sd > 0.0 && std::isfinite(sd), ErrorCode::DegenerateVariance, "standardizing by a zero scale");
  std::vector<double> z(sample.begin(), sample.end());
  for (auto& v : z) v = (v - mean) / sd;
  std::sort(z.begin(), z.end());
  const double r = static_cast<double>(z.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double phi = stein::normal_cdf(z[i]);
    worst = std::max({worst, std::fabs(static_cast<double>(i + 1) / r - phi), std::fabs(static_cast<double>(i) / r - phi)});
  }
  return {worst, dkw_band(z.size()), z.size()};
}

KolmogorovDistance empirical_kolmogorov(std::span<const double> sample, bool standardize) {
  require(sample.size() >= 100, ErrorCode::TooFewSamples, "empirical_kolmogorov needs at least 100 samples");
  if (!standardize) return empirical_kolmogorov(sample, 0.0, 1.0);
  const auto stats = summarize(sample);
  return empirical_kolmogorov(sample, stats.mean(), std::sqrt(stats.variance()));
}

RateFit fit_rate(std::span<const double> ns, std::span<const Estimate> values) {
  require(ns.size() == values.size(), ErrorCode::LengthMismatch, "fit_rate: sizes and values differ in length");
  require(ns.size() >= 3, ErrorCode::TooFewSamples, "fit_rate needs at least three sizes");
  RateFit fit;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    require(ns[i] > 0.0 && values[i].value > 0.0, ErrorCode::NonpositiveValue, "fit_rate needs positive values");
    fit.points.push_back({ns[i], values[i], true});
  }
  std::sort(fit.points.begin(), fit.points.end(), [](const RatePoint& a, const RatePoint& b) { return a.n < b.n; });
  if (fit.points.size() >= 4 && fit.points[0].value.se > 0.25 * fit.points[0].value.value) fit.points[0].used = false;

  double sx = 0, sy = 0, k = 0;
  for (const auto& p : fit.points)
    if (p.used) {
      sx += std::log(p.n);
      sy += std::log(p.value.value);
      ++k;
    }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : fit.points)
    if (p.used) {
      const double dx = std::log(p.n) - mx, dy = std::log(p.value.value) - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  const double ssr = std::max(0.0, syy - fit.exponent * sxy);
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.exponent_se = k > 2 ? std::sqrt(ssr / (k - 2) / sxx) : 0.0;
  return fit;
}

void ExperimentConfig::validate() const {
  require(reps >= 30, ErrorCode::InvalidArgument, "reps must be at least 30");
  require(!n_list.empty(), ErrorCode::InvalidArgument, "n_list is empty");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    require(n_list[i] > n_list[i - 1], ErrorCode::InvalidArgument, "n_list must be strictly increasing");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, std::span<const CsvRow> rows) {
  out << "experiment_id,n,statistic,value,se\n";
  for (const auto& r : rows)
    out << r.experiment_id << ',' << r.n << ',' << r.statistic << ',' << format_double(r.value) << ','
        << format_double(r.se) << '\n';
}

}  // namespace bebp
