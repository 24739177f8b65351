#pragma once

#include <cstddef>
#include <vector>

namespace bebp::stein {

inline constexpr double kSqrt2Pi = 2.5066282746310002;
// sup of g_t over t and w.
inline constexpr double kGBound = kSqrt2Pi / 4.0;

double normal_cdf(double x);
// 1 - Φ(x) without cancellation.
double normal_sf(double x);
// exp(z^2) erfc(z) for z >= 0.
double erfcx(double z);

// Bounded solution of g'(w) - w g(w) = 1{w <= t} - Φ(t).
double g(double t, double w);
// Derivative, with g'(t) := t g(t) + 1 - Φ(t) at the jump.
double g_prime(double t, double w);
// Five-point finite-difference derivative of g in w.
double g_prime_numeric(double t, double w, double h = 1e-3);

struct Defect {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }
};

// |g(w+h) - g(w) - g'(w) h| against (h^2/2)(|w| + c) + |h|(1[w,w+h)(t) + 1[w+h,w)(t)).
Defect taylor_defect(double t, double w, double h);
// |(w+u)g(w+u) - (w+v)g(w+v)| against (|w| + c)(|u| + |v|).
Defect lipschitz_product_defect(double t, double w, double u, double v);

struct SweepConfig {
  double lo = -6.0, hi = 6.0, step = 0.01;
  double defect_lo = -4.0, defect_hi = 4.0;
  double taylor_step = 0.02;
  double lipschitz_step = 0.05;
  std::vector<double> h_values;   // default ±2^k·1e-3, k = 0..10
  std::vector<double> uv_values;  // default [-1, 1] step 0.25
};

struct SweepReport {
  std::size_t points = 0;
  double max_equation_residual = 0.0;  // finite-difference g' vs the Stein equation, w != t
  double max_closed_form_residual = 0.0;
  double min_g = 0.0;
  double max_g = 0.0;
  double max_abs_g_prime = 0.0;
  double min_taylor_slack = 0.0;
  double min_lipschitz_slack = 0.0;
  std::size_t taylor_cases = 0;
  std::size_t lipschitz_cases = 0;
};

SweepReport sweep(const SweepConfig& config = {});

}  // namespace bebp::stein
