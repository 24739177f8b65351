#include "bebp/geometry/rolling_ball.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "bebp/core/error.hpp"

namespace bebp {

RollingBall rolling_ball_integral(const ShapeSet& K, double r, double beta, const IntegrationGrid& grid,
                                  std::size_t inner_per_axis) {
  require(r > 0 && beta > 0, ErrorCode::InvalidArgument, "r and beta must be positive");
  require(inner_per_axis >= 1, ErrorCode::InvalidArgument, "inner lattice needs at least one point per axis");
  const std::size_t d = grid.dim();
  require(static_cast<std::size_t>(K.dim()) == d, ErrorCode::DimensionMismatch, "grid and shape differ");

  // offsets u of the unit-ball midpoint lattice, packed d per point
  std::vector<double> inner;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= inner_per_axis;
  const double step = 2.0 / static_cast<double>(inner_per_axis);
  for (std::size_t c = 0; c < total; ++c) {
    std::array<double, kMaxDim> u{};
    double n2 = 0.0;
    for (std::size_t k = d, rem = c; k-- > 0; rem /= inner_per_axis) {
      u[k] = -1.0 + (static_cast<double>(rem % inner_per_axis) + 0.5) * step;
      n2 += u[k] * u[k];
    }
    if (n2 <= 1.0) inner.insert(inner.end(), u.begin(), u.begin() + d);
  }
  const double br = beta * r;
  const double inner_weight = std::pow(br * step, static_cast<double>(d));
  const double rd = std::pow(r, static_cast<double>(d));

  RollingBall out;
  std::array<double, kMaxDim> x{}, y{};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t k = 0; k < d; ++k) x[k] = grid.coord(p, k);
    const std::span<const double> xs(x.data(), d);
    if (K.distance_to_boundary(xs) > r) continue;
    out.boundary_volume += grid.cell_volume();
    const bool inside = K.contains(xs);
    // outside points measure the ball's overlap with K, inside points with K^c
    std::size_t hits = 0;
    for (std::size_t q = 0; q < inner.size(); q += d) {
      bool in_cube = true;
      for (std::size_t k = 0; k < d; ++k) {
        y[k] = x[k] + br * inner[q + k];
        in_cube = in_cube && y[k] >= 0.0 && y[k] <= 1.0;
      }
      if (!in_cube) continue;
      if (K.contains(std::span<const double>(y.data(), d)) != inside) ++hits;
    }
    const double v = static_cast<double>(hits) * inner_weight / rd;
    (inside ? out.gamma_minus : out.gamma_plus) += v * v * grid.cell_volume();
  }
  if (out.boundary_volume > 0) out.ratio = (out.gamma_plus + out.gamma_minus) / out.boundary_volume;
  return out;
}

}  // namespace bebp
