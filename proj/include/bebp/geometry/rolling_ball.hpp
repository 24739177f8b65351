#pragma once

#include <cstddef>

#include "bebp/geometry/grid.hpp"
#include "bebp/geometry/shape.hpp"

namespace bebp {

struct RollingBall {
  double gamma_plus = 0.0;        // γ(K, r)
  double gamma_minus = 0.0;       // γ(K^c, r), complement taken in the cube
  double boundary_volume = 0.0;   // Vol(∂K^r)
  double ratio = 0.0;             // (γ+ + γ-) / Vol(∂K^r), 0 when the shell is empty
};

// γ(K, r) = ∫ over points outside K within r of ∂K of (Vol(B(x, βr) ∩ K) / r^d)^2,
// by quadrature on the grid; the inner volume uses a midpoint lattice with
// inner_per_axis points per axis on the ball's bounding cube.
RollingBall rolling_ball_integral(const ShapeSet& K, double r, double beta, const IntegrationGrid& grid,
                                  std::size_t inner_per_axis = 16);

}  // namespace bebp
