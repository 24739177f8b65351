#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bebp/core/rng.hpp"

namespace bebp {

inline constexpr std::size_t kMaxDim = 4;

// Stratified quadrature lattice on [0, side]^d: s strata per axis, one point
// per stratum at a uniform position inside it. Points are stored tile by tile
// (blocks of strata) so that every tile is a contiguous run.
class IntegrationGrid {
 public:
  struct Tile {
    std::size_t begin = 0, end = 0;
    std::array<double, kMaxDim> lo{}, hi{};
  };

  static IntegrationGrid stratified(std::size_t dim, std::size_t m_target, RandomStream& stream, double side = 1.0,
                                    std::size_t tile_points = 16);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return stratum_.size(); }
  double side() const { return side_; }
  std::size_t strata_per_axis() const { return s_; }
  double spacing() const { return side_ / static_cast<double>(s_); }
  double cell_volume() const { return cell_volume_; }

  const double* coords(std::size_t k) const { return coords_[k].data(); }
  double coord(std::size_t p, std::size_t k) const { return coords_[k][p]; }
  const std::vector<Tile>& tiles() const { return tiles_; }
  std::size_t tiles_per_axis() const { return tiles_per_axis_; }
  // Tile holding position x (clamped into the grid).
  std::size_t tile_of(const double* x) const;
  // Calls visit(t) for every tile sharing at least a corner with tile `tile`.
  template <class Visit>
  void for_each_adjacent_tile(std::size_t tile, Visit&& visit) const;
  // Lower corner of the stratum holding point p along axis k.
  double stratum_lo(std::size_t p, std::size_t k) const;

 private:
  std::size_t dim_ = 0, s_ = 0, tile_strata_ = 1, tiles_per_axis_ = 1;
  double side_ = 1.0, cell_volume_ = 0.0;
  std::array<std::vector<double>, kMaxDim> coords_;
  std::vector<std::uint32_t> stratum_;
  std::vector<Tile> tiles_;
};

template <class Visit>
void IntegrationGrid::for_each_adjacent_tile(std::size_t tile, Visit&& visit) const {
  const std::size_t T = tiles_per_axis_;
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t k = dim_, r = tile; k-- > 0; r /= T) idx[k] = r % T;
  std::size_t combos = 1;
  for (std::size_t k = 0; k < dim_; ++k) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t t = 0, r = c;
    bool ok = true, self = true;
    for (std::size_t k = 0; k < dim_; ++k, r /= 3) {
      const std::size_t off = r % 3;  // 0: -1, 1: same, 2: +1
      if (off != 1) self = false;
      if ((off == 0 && idx[k] == 0) || (off == 2 && idx[k] + 1 >= T)) {
        ok = false;
        break;
      }
    }
    if (!ok || self) continue;
    r = c;
    std::array<std::size_t, kMaxDim> j{};
    for (std::size_t k = 0; k < dim_; ++k, r /= 3) j[k] = idx[k] + (r % 3) - 1;
    for (std::size_t k = 0; k < dim_; ++k) t = t * T + j[k];
    visit(t);
  }
}

}  // namespace bebp
