#include "bebp/geometry/covering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"
#include "bebp/simd/kernels.hpp"

namespace bebp {

RadiusLaw RadiusLaw::constant(double r) {
  require(r >= 0, ErrorCode::InvalidArgument, "radius must be nonnegative");
  return {Kind::Constant, r, r};
}

RadiusLaw RadiusLaw::uniform(double a, double b) {
  require(0 <= a && a <= b, ErrorCode::InvalidArgument, "uniform radius law needs 0 <= a <= b");
  return {Kind::Uniform, a, b};
}

RadiusLaw RadiusLaw::pareto(double scale, double shape) {
  require(scale > 0 && shape > 0, ErrorCode::InvalidArgument, "Pareto law needs positive scale and shape");
  return {Kind::Pareto, scale, shape};
}

std::string RadiusLaw::name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Uniform: return "uniform";
    case Kind::Pareto: return "pareto";
  }
  return "?";
}

double RadiusLaw::draw(RandomStream& stream) const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Uniform: return a_ + (b_ - a_) * stream.uniform();
    case Kind::Pareto: return a_ * std::pow(stream.uniform_open_low(), -1.0 / b_);
  }
  return 0.0;
}

bool RadiusLaw::finite_moment(double q) const { return kind_ != Kind::Pareto || q < b_; }

GermGrainLaw::GermGrainLaw(int dim, std::size_t n, RadiusLaw radius)
    : dim_(dim), side_(std::pow(static_cast<double>(n), 1.0 / dim)), radius_(radius) {
  require(dim >= 1 && dim <= static_cast<int>(kMaxDim), ErrorCode::DimensionMismatch, "dimension must be in [1, 4]");
  require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
}

void GermGrainLaw::draw(RandomStream& stream, std::span<double> out) const {
  for (int k = 0; k < dim_; ++k) out[k] = side_ * stream.uniform();
  out[dim_] = radius_.draw(stream);
}

namespace {

constexpr std::size_t kTilesPerChunk = 64;

// Grains split into "small" ones (radius at most half the bucket width),
// bucketed by center, and "large" ones that every query must look at. The
// half-width slack keeps bucket rounding from ever hiding a grain.
struct GrainBuckets {
  std::size_t dim = 0, per_axis = 1;
  double width = 1.0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> members;
  std::vector<std::uint32_t> large;

  GrainBuckets(const Configuration& g, std::size_t d, double side) : dim(d) {
    const std::size_t n = g.size();
    per_axis = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / d))));
    width = side / static_cast<double>(per_axis);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= per_axis;
    offsets.assign(total + 1, 0);
    std::vector<std::size_t> bucket(n, total);
    for (std::size_t i = 0; i < n; ++i) {
      if (g[i][d] > 0.5 * width) {
        large.push_back(static_cast<std::uint32_t>(i));
        continue;
      }
      std::size_t b = 0;
      for (std::size_t k = 0; k < d; ++k) b = b * per_axis + axis_index(g[i][k]);
      bucket[i] = b;
      ++offsets[b + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    members.resize(offsets.back());
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (bucket[i] != total) members[fill[bucket[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::size_t axis_index(double c) const {
    const double t = std::floor(c / width);
    if (!(t > 0)) return 0;
    return std::min(per_axis - 1, static_cast<std::size_t>(t));
  }

  // Small grains bucketed within `rings` buckets of the box [lo, hi].
  template <class Visit>
  void around(const double* lo, const double* hi, std::size_t rings, Visit&& visit) const {
    std::array<std::size_t, kMaxDim> a{}, b{}, idx{};
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t l = axis_index(lo[k]), h = axis_index(hi[k]);
      a[k] = l >= rings ? l - rings : 0;
      b[k] = std::min(per_axis - 1, h + rings);
      idx[k] = a[k];
    }
    while (true) {
      std::size_t bk = 0;
      for (std::size_t k = 0; k < dim; ++k) bk = bk * per_axis + idx[k];
      for (std::size_t s = offsets[bk]; s < offsets[bk + 1]; ++s) visit(members[s]);
      std::size_t k = dim;
      while (k > 0) {
        --k;
        if (++idx[k] <= b[k]) break;
        idx[k] = a[k];
        if (k == 0) return;
      }
    }
  }
};

}  // namespace

std::uint64_t covered_count(const IntegrationGrid& grid, const Configuration& grains) {
  const std::size_t d = grid.dim();
  require(grains.width() == d + 1, ErrorCode::DimensionMismatch, "grain width must be d + 1");
  if (grains.empty()) return 0;
  const GrainBuckets gb(grains, d, grid.side());
  const auto& kt = simd::kernels();
  const auto& tiles = grid.tiles();
  const std::size_t chunks = (tiles.size() + kTilesPerChunk - 1) / kTilesPerChunk;
  std::vector<std::uint64_t> partial(chunks, 0);
  parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<double> centers, radius2;
    std::vector<std::uint8_t> covered;
    std::array<const double*, kMaxDim> ptr{};
    auto add = [&](std::uint32_t i) {
      for (std::size_t k = 0; k < d; ++k) centers.push_back(grains[i][k]);
      radius2.push_back(grains[i][d] * grains[i][d]);
    };
    const std::size_t t_end = std::min(tiles.size(), (chunk + 1) * kTilesPerChunk);
    for (std::size_t t = chunk * kTilesPerChunk; t < t_end; ++t) {
      const auto& tile = tiles[t];
      centers.clear();
      radius2.clear();
      // a small grain touching the tile has its center within one bucket of it
      gb.around(tile.lo.data(), tile.hi.data(), 1, add);
      for (std::uint32_t i : gb.large) add(i);
      const std::size_t count = tile.end - tile.begin;
      covered.assign(count, 0);
      for (std::size_t k = 0; k < d; ++k) ptr[k] = grid.coords(k) + tile.begin;
      kt.cover(simd::PointBlock{ptr.data(), count, d}, centers.data(), radius2.data(), radius2.size(),
               covered.data());
      partial[chunk] += static_cast<std::uint64_t>(std::count(covered.begin(), covered.end(), 1));
    }
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

double covering_volume(const IntegrationGrid& grid, const Configuration& grains) {
  return static_cast<double>(covered_count(grid, grains)) * grid.cell_volume();
}

std::size_t isolated_count(const Configuration& grains, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  require(grains.width() == d + 1, ErrorCode::DimensionMismatch, "grain width must be d + 1");
  const std::size_t n = grains.size();
  if (n == 0) return 0;
  double side = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) side = std::max(side, grains[i][k]);
  side = std::max(side, 1e-300) * (1 + 1e-12);
  const GrainBuckets gb(grains, d, side);
  std::vector<std::uint8_t> touched(n, 0);
  auto meets = [&](std::size_t i, std::size_t j) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) d2 += (grains[i][k] - grains[j][k]) * (grains[i][k] - grains[j][k]);
    const double r = grains[i][d] + grains[j][d];
    return d2 <= r * r;
  };
  auto test = [&](std::size_t i, std::size_t j) {
    if (i != j && meets(i, j)) touched[i] = touched[j] = 1;
  };
  for (std::size_t i = 0; i < n; ++i) {
    // two small grains can only meet if their centers are within two buckets
    if (grains[i][d] <= 0.5 * gb.width) {
      const double* c = grains[i].data();
      gb.around(c, c, 2, [&](std::uint32_t j) { test(i, j); });
    }
    for (std::uint32_t j : gb.large) test(i, j);
  }
  return static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 0));
}

CoveringVolume::CoveringVolume(std::shared_ptr<const IntegrationGrid> grid) : grid_(std::move(grid)) {}

double CoveringVolume::evaluate(const Configuration& y) const { return covering_volume(*grid_, y); }

double CoveringVolume::replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const {
  Configuration z = y;
  z.set(j, value);
  const auto a = static_cast<std::int64_t>(covered_count(*grid_, y));
  const auto b = static_cast<std::int64_t>(covered_count(*grid_, z));
  return static_cast<double>(a - b) * grid_->cell_volume();
}

double CoveringVolume::delete_difference(const Configuration& y, std::size_t i) const {
  const auto a = static_cast<std::int64_t>(covered_count(*grid_, y));
  const auto b = static_cast<std::int64_t>(covered_count(*grid_, y.without(i)));
  return static_cast<double>(a - b) * grid_->cell_volume();
}

FunctionalFactory covering_volume_factory(int dim, std::size_t n, double density) {
  require(density > 0, ErrorCode::InvalidArgument, "grid density must be positive");
  return [dim, n, density](RandomStream& integration) -> FunctionalPtr {
    const double side = std::pow(static_cast<double>(n), 1.0 / dim);
    const auto m = static_cast<std::size_t>(std::llround(density * static_cast<double>(n)));
    return std::make_shared<CoveringVolume>(std::make_shared<const IntegrationGrid>(
        IntegrationGrid::stratified(static_cast<std::size_t>(dim), m, integration, side)));
  };
}

}  // namespace bebp
