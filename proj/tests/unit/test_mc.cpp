#include <algorithm>
#include <cmath>
#include <sstream>

#include "bebp/core/error.hpp"
#include "bebp/mc/mc.hpp"
#include "bebp/stein/stein.hpp"
#include "doctest.h"

using namespace bebp;

namespace {

const auto kSigns = Distribution::uniform(SampleSpace::numeric_alphabet({-1, 1}));

// Oracle: |ECDF - Φ| on a dense grid, evaluating the ECDF by counting.
double dense_grid_distance(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double worst = 0.0;
  for (double t = -6.0; t <= 6.0; t += 1e-4) {
    const auto below = std::upper_bound(xs.begin(), xs.end(), t) - xs.begin();
    worst = std::max(worst, std::fabs(static_cast<double>(below) / xs.size() - stein::normal_cdf(t)));
  }
  return worst;
}

}  // namespace

TEST_CASE("replicate: constant, sum variance, determinism") {
  const SeedPolicy seeds(11);
  const auto constant = replicate(fixed_functional(std::make_shared<functionals::Constant>(3.0)), kSigns, 10, 50, seeds);
  CHECK(constant.variance.value == 0.0);
  CHECK(constant.mean.value == 3.0);

  const auto sum = replicate(fixed_functional(std::make_shared<functionals::Sum>()), kSigns, 20, 4000, seeds);
  CHECK(std::fabs(sum.variance.value - 20.0) <= 4 * sum.variance.se);
  const auto again = replicate(fixed_functional(std::make_shared<functionals::Sum>()), kSigns, 20, 4000, seeds);
  CHECK(again.values == sum.values);
}

TEST_CASE("replicate: variance confidence interval coverage on the sum") {
  std::size_t covered = 0;
  for (std::uint64_t meta = 0; meta < 200; ++meta) {
    const auto r = replicate(fixed_functional(std::make_shared<functionals::Sum>()), kSigns, 8, 300,
                             SeedPolicy(1000 + meta));
    if (std::fabs(r.variance.value - 8.0) <= 1.96 * r.variance.se) ++covered;
  }
  CHECK(covered >= 180);
}

// The DKW band at 95% coincides with the asymptotic Kolmogorov quantile, so the
// true coverage sits just above 0.95 and 100 meta-reps straddle the threshold.
TEST_CASE("empirical_kolmogorov: DKW coverage on normal samples, 100 meta-reps" * doctest::may_fail()) {
  std::size_t inside = 0;
  for (std::uint64_t meta = 0; meta < 100; ++meta) {
    auto stream = SeedPolicy(meta).stream(0, Role::Normal);
    std::vector<double> xs(500);
    for (auto& x : xs) x = stream.normal();
    const auto d = empirical_kolmogorov(xs, false);
    CHECK(d.band == doctest::Approx(std::sqrt(std::log(2.0 / 0.05) / 1000.0)));
    if (d.value <= d.band) ++inside;
  }
  CHECK(inside >= 95);
}

TEST_CASE("empirical_kolmogorov: DKW coverage is not below 95%") {
  const std::size_t meta = 4000;
  std::size_t inside = 0;
  for (std::uint64_t m = 0; m < meta; ++m) {
    auto stream = SeedPolicy(50000 + m).stream(0, Role::Normal);
    std::vector<double> xs(100);
    for (auto& x : xs) x = stream.normal();
    const auto d = empirical_kolmogorov(xs, false);
    if (d.value <= d.band) ++inside;
  }
  const double coverage = static_cast<double>(inside) / meta;
  CHECK(coverage >= 0.95 - 3.0 * std::sqrt(0.95 * 0.05 / meta));
}

TEST_CASE("empirical_kolmogorov: point mass, jump points, shift invariance, size check") {
  const std::vector<double> point(200, 0.3);
  CHECK(empirical_kolmogorov(point, false).value >= 0.5);
  CHECK_THROWS_AS(empirical_kolmogorov(point, true), Error);
  CHECK_THROWS_AS(empirical_kolmogorov(std::vector<double>(99, 0.0), false), Error);

  auto stream = SeedPolicy(5).stream(0, Role::Normal);
  std::vector<double> xs(300);
  for (auto& x : xs) x = 0.8 * stream.normal() + 0.2 * stream.uniform();
  CHECK(empirical_kolmogorov(xs, false).value == doctest::Approx(dense_grid_distance(xs)).epsilon(1e-3));

  std::vector<double> shifted = xs;
  for (auto& x : shifted) x += 17.0;
  CHECK(empirical_kolmogorov(shifted, true).value == doctest::Approx(empirical_kolmogorov(xs, true).value));
}

TEST_CASE("fit_rate: exact power, noisy power, scale invariance, errors") {
  const std::vector<double> ns{100, 200, 400, 800, 1600};
  std::vector<Estimate> exact;
  for (double n : ns) exact.push_back({std::pow(n, -1.5), 0.0});
  const auto fit = fit_rate(ns, exact);
  CHECK(fit.exponent == doctest::Approx(-1.5));
  CHECK(fit.r2 == doctest::Approx(1.0));

  auto stream = SeedPolicy(3).stream(0, Role::Normal);
  std::vector<Estimate> noisy, scaled;
  for (double n : ns) {
    const double v = 2.0 / n * std::exp(0.05 * stream.normal());
    noisy.push_back({v, 0.05 * v});
    scaled.push_back({7.0 * v, 0.35 * v});
  }
  const auto nf = fit_rate(ns, noisy);
  CHECK(std::fabs(nf.exponent + 1.0) <= 0.15);
  CHECK(nf.r2 >= 0.0);
  CHECK(nf.r2 <= 1.0);
  CHECK(fit_rate(ns, scaled).exponent == doctest::Approx(nf.exponent));

  CHECK_THROWS_AS(fit_rate(std::vector<double>{1, 2}, std::vector<Estimate>{{1, 0}, {2, 0}}), Error);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1, 2, 3}, std::vector<Estimate>{{1, 0}, {0, 0}, {2, 0}}), Error);
}

TEST_CASE("fit_rate drops a noisy smallest size") {
  const std::vector<double> ns{10, 100, 1000, 10000};
  const std::vector<Estimate> values{{5.0, 2.0}, {0.01, 0.0001}, {0.001, 0.00001}, {0.0001, 0.000001}};
  const auto fit = fit_rate(ns, values);
  CHECK_FALSE(fit.points[0].used);
  CHECK(fit.exponent == doctest::Approx(-1.0));
}

TEST_CASE("experiment config and csv") {
  ExperimentConfig c;
  c.n_list = {10, 20, 40};
  c.reps = 30;
  CHECK_NOTHROW(c.validate());
  c.reps = 29;
  CHECK_THROWS_AS(c.validate(), Error);
  c.reps = 30;
  c.n_list = {10, 10, 20};
  CHECK_THROWS_AS(c.validate(), Error);

  std::ostringstream out;
  const std::vector<CsvRow> rows{{"exp", 10, "variance", 0.1, 0.25}};
  write_csv(out, rows);
  CHECK(out.str() == "experiment_id,n,statistic,value,se\nexp,10,variance,0.1,0.25\n");
}
