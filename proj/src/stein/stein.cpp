#include "bebp/stein/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bebp/core/parallel.hpp"

namespace bebp::stein {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrtPi = 0.56418958354775628695;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double erfcx(double z) {
  if (z < 5.0) return std::exp(z * z) * std::erfc(z);
  // Continued fraction 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), modified Lentz.
  const double tiny = 1e-300;
  double f = z, c = z, d = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double a = 0.5 * k;
    d = z + a * d;
    d = d == 0.0 ? tiny : d;
    c = z + a / c;
    c = c == 0.0 ? tiny : c;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return kInvSqrtPi / f;
}

// Every branch keeps the exponent nonpositive and erfcx at nonnegative arguments.
double g(double t, double w) {
  if (w <= t) {
    if (w <= 0.0) return kSqrt2Pi * 0.5 * erfcx(-w * kInvSqrt2) * normal_sf(t);
    return kSqrt2Pi * normal_cdf(w) * 0.5 * erfcx(t * kInvSqrt2) * std::exp(0.5 * (w * w - t * t));
  }
  if (w >= 0.0) return kSqrt2Pi * normal_cdf(t) * 0.5 * erfcx(w * kInvSqrt2);
  return kSqrt2Pi * 0.5 * erfcx(-t * kInvSqrt2) * std::exp(0.5 * (w * w - t * t)) * normal_sf(w);
}

double g_prime(double t, double w) { return w * g(t, w) + (w <= t ? 1.0 : 0.0) - normal_cdf(t); }

double g_prime_numeric(double t, double w, double h) {
  return (-g(t, w + 2 * h) + 8 * g(t, w + h) - 8 * g(t, w - h) + g(t, w - 2 * h)) / (12 * h);
}

Defect taylor_defect(double t, double w, double h) {
  const double lhs = std::abs(g(t, w + h) - g(t, w) - g_prime(t, w) * h);
  const bool straddle = (w <= t && t < w + h) || (w + h <= t && t < w);
  const double rhs = 0.5 * h * h * (std::abs(w) + kGBound) + (straddle ? std::abs(h) : 0.0);
  return {lhs, rhs};
}

Defect lipschitz_product_defect(double t, double w, double u, double v) {
  const double lhs = std::abs((w + u) * g(t, w + u) - (w + v) * g(t, w + v));
  const double rhs = (std::abs(w) + kGBound) * (std::abs(u) + std::abs(v));
  return {lhs, rhs};
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  return out;
}

struct Partial {
  double eq = 0, closed = 0, min_g = std::numeric_limits<double>::infinity(), max_g = 0, gp = 0;
  double taylor = std::numeric_limits<double>::infinity(), lip = std::numeric_limits<double>::infinity();
  std::size_t taylor_cases = 0, lip_cases = 0;
};

}  // namespace

SweepReport sweep(const SweepConfig& config) {
  auto hs = config.h_values;
  if (hs.empty())
    for (int k = 0; k <= 10; ++k) {
      hs.push_back(std::ldexp(1e-3, k));
      hs.push_back(-std::ldexp(1e-3, k));
    }
  auto uv = config.uv_values.empty() ? grid(-1.0, 1.0, 0.25) : config.uv_values;

  const auto main = grid(config.lo, config.hi, config.step);
  const auto taylor = grid(config.defect_lo, config.defect_hi, config.taylor_step);
  const auto lip = grid(config.defect_lo, config.defect_hi, config.lipschitz_step);

  // Rows of t are the parallel unit; each row writes its own partial.
  const std::size_t rows = std::max({main.size(), taylor.size(), lip.size()});
  std::vector<Partial> parts(rows);
  parallel_for(rows, [&](std::size_t r) {
    Partial& p = parts[r];
    if (r < main.size()) {
      const double t = main[r];
      for (std::size_t c = 0; c < main.size(); ++c) {
        const double w = main[c];
        const double gv = g(t, w), gp = g_prime(t, w);
        p.min_g = std::min(p.min_g, gv);
        p.max_g = std::max(p.max_g, gv);
        p.gp = std::max(p.gp, std::abs(gp));
        if (c == r) continue;  // same grid index, w == t
        const double rhs = (w <= t ? 1.0 : 0.0) - normal_cdf(t);
        p.eq = std::max(p.eq, std::abs(g_prime_numeric(t, w) - w * gv - rhs));
        p.closed = std::max(p.closed, std::abs(gp - w * gv - rhs));
      }
    }
    if (r < taylor.size()) {
      const double t = taylor[r];
      for (double w : taylor)
        for (double h : hs) {
          p.taylor = std::min(p.taylor, taylor_defect(t, w, h).slack() + 1e-12);
          ++p.taylor_cases;
        }
    }
    if (r < lip.size()) {
      const double t = lip[r];
      for (double w : lip)
        for (double u : uv)
          for (double v : uv) {
            p.lip = std::min(p.lip, lipschitz_product_defect(t, w, u, v).slack() + 1e-12);
            ++p.lip_cases;
          }
    }
  });

  SweepReport out;
  out.points = main.size() * main.size();
  out.min_g = std::numeric_limits<double>::infinity();
  out.min_taylor_slack = out.min_lipschitz_slack = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    out.max_equation_residual = std::max(out.max_equation_residual, p.eq);
    out.max_closed_form_residual = std::max(out.max_closed_form_residual, p.closed);
    out.min_g = std::min(out.min_g, p.min_g);
    out.max_g = std::max(out.max_g, p.max_g);
    out.max_abs_g_prime = std::max(out.max_abs_g_prime, p.gp);
    out.min_taylor_slack = std::min(out.min_taylor_slack, p.taylor);
    out.min_lipschitz_slack = std::min(out.min_lipschitz_slack, p.lip);
    out.taylor_cases += p.taylor_cases;
    out.lipschitz_cases += p.lip_cases;
  }
  return out;
}

}  // namespace bebp::stein
