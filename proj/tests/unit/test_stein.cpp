#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>

#include "bebp/stein/stein.hpp"
#include "doctest.h"

using namespace bebp::stein;

namespace {

// g_t(w) = e^{w^2/2} ∫_{-∞}^{w} (1{x<=t} - Φ(t)) e^{-x^2/2} dx, by quadrature.
double g_quadrature(double t, double w) {
  const double phi_t = 0.5 * std::erfc(-t / std::sqrt(2.0));
  auto integrand = [&](double x) { return ((x <= t ? 1.0 : 0.0) - phi_t) * std::exp(0.5 * (w * w - x * x)); };
  // split at t so each piece is smooth
  const double split = std::min(t, w);
  boost::math::quadrature::exp_sinh<double> tail;
  double total = tail.integrate([&](double s) { return integrand(split - s); }, 0.0,
                                std::numeric_limits<double>::infinity());
  if (w > split) total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, split, w, 15, 1e-14);
  return total;
}

}  // namespace

TEST_CASE("normal cdf and erfcx") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(normal_sf(8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-13));
  for (double z : {0.0, 0.5, 2.0, 4.9, 5.0, 5.1, 8.0, 26.0}) {
    // erfcx(z) ~ 1/(z√π) (1 - 1/(2z^2) + 3/(4z^4)); compare against exp·erfc where that is finite
    if (z < 26.0) CHECK(erfcx(z) == doctest::Approx(std::exp(z * z) * std::erfc(z)).epsilon(1e-13));
  }
  CHECK(erfcx(1e3) == doctest::Approx(1.0 / (1e3 * std::sqrt(M_PI)) * (1 - 0.5e-6)).epsilon(1e-12));
}

TEST_CASE("g examples") {
  CHECK(g(0.0, 0.0) == doctest::Approx(kGBound).epsilon(1e-15));
  CHECK(std::abs(g(0.0, 0.0) - g_quadrature(0.0, 0.0)) < 1e-12);
  CHECK(g(0.0, -30.0) <= 0.04);
  CHECK(g(0.0, -30.0) > 0.0);
  for (double t = -5.0; t <= 5.0; t += 0.25) CHECK(std::abs(g(t, t - 1e-6) - g(t, t + 1e-6)) < 1e-5);
  for (double w : {-40.0, 40.0}) CHECK(std::isfinite(g(0.3, w)));
  CHECK(std::isfinite(g(-40.0, 40.0)));
  CHECK(std::isfinite(g(40.0, -40.0)));
}

TEST_CASE("g matches the integral representation") {
  for (double t : {-3.0, -1.0, 0.0, 0.7, 2.5})
    for (double w : {-5.0, -2.0, -0.3, 0.0, 0.4, 1.5, 4.0}) {
      const double q = g_quadrature(t, w);
      CHECK(std::abs(g(t, w) - q) <= 1e-10 * std::max(1.0, std::abs(q)));
    }
}

TEST_CASE("g_prime") {
  CHECK(g_prime(0.0, 0.0) == doctest::Approx(0.5));
  const double h = 1e-5;
  for (double t : {-2.0, 0.0, 1.3})
    for (double w = -6.0; w <= 6.0; w += 0.37) {
      if (std::abs(w - t) < 2 * h) continue;
      CHECK(std::abs((g(t, w + h) - g(t, w - h)) / (2 * h) - g_prime(t, w)) < 1e-6);
    }
}

TEST_CASE("defect examples") {
  CHECK(taylor_defect(0.3, 1.0, 0.0).lhs == 0.0);
  CHECK(taylor_defect(0.3, 1.0, 0.0).rhs == 0.0);
  const auto straddle = taylor_defect(0.0, -0.1, 0.2);
  // h^2/2 = 0.02, |w| + c = 0.1 + c, plus the full |h| = 0.2 from the indicator
  CHECK(straddle.rhs == doctest::Approx(0.02 * (0.1 + kGBound) + 0.2));
  CHECK(straddle.lhs <= straddle.rhs);
  CHECK(lipschitz_product_defect(1.0, 0.5, 0.2, 0.2).lhs == 0.0);
  const auto lp = lipschitz_product_defect(10.0, 0.0, 1.0, -1.0);
  CHECK(lp.rhs == doctest::Approx(kSqrt2Pi / 2));
  CHECK(lp.lhs <= lp.rhs);
}

TEST_CASE("coarse sweep") {
  SweepConfig cfg;
  cfg.step = 0.05;
  cfg.taylor_step = 0.1;
  cfg.lipschitz_step = 0.1;
  const auto r = sweep(cfg);
  CHECK(r.max_equation_residual <= 1e-10);
  CHECK(r.max_closed_form_residual <= 1e-10);
  CHECK(r.min_g > 0.0);
  CHECK(r.max_g <= kGBound + 1e-12);
  CHECK(r.max_abs_g_prime <= 1.0 + 1e-12);
  CHECK(r.min_taylor_slack >= 0.0);
  CHECK(r.min_lipschitz_slack >= 0.0);
}
