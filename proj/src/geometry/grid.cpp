#include "bebp/geometry/grid.hpp"

#include <algorithm>
#include <cmath>

#include "bebp/core/error.hpp"

namespace bebp {

namespace {

std::size_t integer_root(std::size_t m, std::size_t d) {
  auto r = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(m), 1.0 / static_cast<double>(d))));
  return std::max<std::size_t>(r, 1);
}

}  // namespace

IntegrationGrid IntegrationGrid::stratified(std::size_t dim, std::size_t m_target, RandomStream& stream, double side,
                                            std::size_t tile_points) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::DimensionMismatch, "grid dimension must be in [1, 4]");
  require(m_target >= 1 && side > 0, ErrorCode::InvalidArgument, "grid needs m >= 1 and a positive side");
  IntegrationGrid g;
  g.dim_ = dim;
  g.side_ = side;
  g.s_ = integer_root(m_target, dim);
  const std::size_t s = g.s_;
  std::size_t m = 1;
  for (std::size_t k = 0; k < dim; ++k) m *= s;
  require(m < (std::size_t{1} << 32), ErrorCode::InvalidArgument, "grid too large");
  g.cell_volume_ = std::pow(side, static_cast<double>(dim)) / static_cast<double>(m);
  const double h = g.spacing();

  const std::size_t t = std::min(integer_root(tile_points, dim), s);
  const std::size_t tiles_per_axis = (s + t - 1) / t;
  g.tile_strata_ = t;
  g.tiles_per_axis_ = tiles_per_axis;
  std::size_t tile_count = 1;
  for (std::size_t k = 0; k < dim; ++k) tile_count *= tiles_per_axis;

  for (std::size_t k = 0; k < dim; ++k) g.coords_[k].reserve(m);
  g.stratum_.reserve(m);
  g.tiles_.reserve(tile_count);
  std::array<std::size_t, kMaxDim> tile_idx{}, local{}, lo{}, ext{};
  for (std::size_t tile = 0; tile < tile_count; ++tile) {
    for (std::size_t k = dim, r = tile; k-- > 0; r /= tiles_per_axis) tile_idx[k] = r % tiles_per_axis;
    Tile info;
    info.begin = g.stratum_.size();
    std::size_t count = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = tile_idx[k] * t;
      ext[k] = std::min(t, s - lo[k]);
      count *= ext[k];
      info.lo[k] = static_cast<double>(lo[k]) * h;
      info.hi[k] = static_cast<double>(lo[k] + ext[k]) * h;
    }
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t k = dim, r = c; k-- > 0; r /= ext[k]) local[k] = r % ext[k];
      std::uint32_t id = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const std::size_t idx = lo[k] + local[k];
        id = static_cast<std::uint32_t>(id * s + idx);
        g.coords_[k].push_back((static_cast<double>(idx) + stream.uniform()) * h);
      }
      g.stratum_.push_back(id);
    }
    info.end = g.stratum_.size();
    g.tiles_.push_back(info);
  }
  return g;
}

std::size_t IntegrationGrid::tile_of(const double* x) const {
  const double w = spacing() * static_cast<double>(tile_strata_);
  std::size_t t = 0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double f = std::floor(x[k] / w);
    const std::size_t i = f > 0 ? std::min(tiles_per_axis_ - 1, static_cast<std::size_t>(f)) : 0;
    t = t * tiles_per_axis_ + i;
  }
  return t;
}

double IntegrationGrid::stratum_lo(std::size_t p, std::size_t k) const {
  std::size_t id = stratum_[p];
  for (std::size_t j = dim_ - 1; j > k; --j) id /= s_;
  return static_cast<double>(id % s_) * spacing();
}

}  // namespace bebp
