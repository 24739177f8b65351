#include "bebp/geometry/voronoi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "bebp/core/error.hpp"
#include "bebp/core/parallel.hpp"
#include "bebp/simd/kernels.hpp"

namespace bebp {

namespace {

constexpr std::size_t kTilesPerChunk = 64;
constexpr double kNucleiPerBucket = 2.0;
constexpr double kMarginSafety = 1.0 - 1e-12;

// Nuclei sorted into a uniform bucket grid over [0, side]^d, row-major with
// the last axis fastest, ids ascending inside each bucket. One nucleus may be
// left out (`skip`), keeping the original ids of the others.
struct NucleusBuckets {
  static constexpr std::size_t kKeepAll = std::numeric_limits<std::size_t>::max();

  std::size_t dim = 0, per_axis = 1;
  double width = 1.0;
  std::vector<std::size_t> offsets;
  std::vector<double> coords, ids;

  NucleusBuckets(const Configuration& X, std::size_t dim_, double side, std::size_t skip = kKeepAll) : dim(dim_) {
    const std::size_t n = X.size();
    const std::size_t kept = n - (skip < n ? 1 : 0);
    per_axis = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(kept) / kNucleiPerBucket, 1.0 / dim))));
    width = side / static_cast<double>(per_axis);
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
    std::vector<std::size_t> bucket(n);
    offsets.assign(total + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == skip) continue;
      std::size_t b = 0;
      for (std::size_t k = 0; k < dim; ++k) b = b * per_axis + axis_index(X[i][k]);
      bucket[i] = b;
      ++offsets[b + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    coords.resize(kept * dim);
    ids.resize(kept);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == skip) continue;
      const std::size_t slot = fill[bucket[i]]++;
      for (std::size_t k = 0; k < dim; ++k) coords[slot * dim + k] = X[i][k];
      ids[slot] = static_cast<double>(i);
    }
  }

  bool empty() const { return ids.empty(); }

  std::size_t axis_index(double c) const {
    const double t = std::floor(c / width);
    if (!(t > 0)) return 0;
    return std::min(per_axis - 1, static_cast<std::size_t>(t));
  }
};

using Range = std::array<std::array<std::size_t, 2>, kMaxDim>;

// Feeds every bucket of `now` that is not in `before` to the kernel, one
// contiguous run of buckets along the last axis at a time.
template <class Visit>
void visit_ring(const NucleusBuckets& nb, const Range& now, const Range* before, Visit&& visit) {
  const std::size_t d = nb.dim, last = d - 1, B = nb.per_axis;
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t k = 0; k < last; ++k) idx[k] = now[k][0];
  while (true) {
    bool row_is_new = before == nullptr;
    std::size_t row = 0;
    for (std::size_t k = 0; k < last; ++k) {
      row = row * B + idx[k];
      if (before && (idx[k] < (*before)[k][0] || idx[k] > (*before)[k][1])) row_is_new = true;
    }
    row *= B;
    auto run = [&](std::size_t a, std::size_t b) {  // inclusive bucket range on the last axis
      const std::size_t begin = nb.offsets[row + a], end = nb.offsets[row + b + 1];
      if (end > begin) visit(simd::Candidates{nb.coords.data() + begin * d, nb.ids.data() + begin, end - begin});
    };
    if (row_is_new) {
      run(now[last][0], now[last][1]);
    } else {
      if (now[last][0] < (*before)[last][0]) run(now[last][0], (*before)[last][0] - 1);
      if (now[last][1] > (*before)[last][1]) run((*before)[last][1] + 1, now[last][1]);
    }
    std::size_t k = last;
    while (k > 0) {
      --k;
      if (++idx[k] <= now[k][1]) break;
      idx[k] = now[k][0];
      if (k == 0) return;
    }
    if (last == 0) return;
  }
}

// Exact nearest (and second-nearest) search for the points of one tile:
// rings of buckets are added until no unvisited nucleus can be closer than
// the current answers.
class TileSearcher {
 public:
  TileSearcher(const IntegrationGrid& grid, const NucleusBuckets& nb) : grid_(grid), nb_(nb), kt_(simd::kernels()) {}

  template <bool Two>
  void search(const IntegrationGrid::Tile& tile) {
    const std::size_t d = grid_.dim(), count = tile.end - tile.begin;
    const double w = nb_.width;
    const std::size_t B = nb_.per_axis;
    bd.assign(count, std::numeric_limits<double>::infinity());
    bi.assign(count, -1.0);
    if constexpr (Two) {
      sd.assign(count, std::numeric_limits<double>::infinity());
      si.assign(count, -1.0);
    }
    if (nb_.empty()) return;
    std::array<const double*, kMaxDim> ptr{};
    for (std::size_t k = 0; k < d; ++k) ptr[k] = grid_.coords(k) + tile.begin;
    const simd::PointBlock block{ptr.data(), count, d};

    Range range{};
    for (std::size_t k = 0; k < d; ++k) range[k] = {nb_.axis_index(tile.lo[k]), nb_.axis_index(tile.hi[k])};
    Range previous{};
    bool first = true;
    while (true) {
      visit_ring(nb_, range, first ? nullptr : &previous, [&](const simd::Candidates& c) {
        if constexpr (Two)
          kt_.nearest2(block, c, bd.data(), bi.data(), sd.data(), si.data());
        else
          kt_.nearest1(block, c, bd.data(), bi.data());
      });
      first = false;
      // unvisited nuclei lie outside the visited bucket box
      double margin = std::numeric_limits<double>::infinity();
      bool complete = true;
      for (std::size_t k = 0; k < d; ++k) {
        if (range[k][0] > 0) {
          complete = false;
          margin = std::min(margin, tile.lo[k] - static_cast<double>(range[k][0]) * w);
        }
        if (range[k][1] + 1 < B) {
          complete = false;
          margin = std::min(margin, static_cast<double>(range[k][1] + 1) * w - tile.hi[k]);
        }
      }
      if (complete) return;
      const double worst = Two ? *std::max_element(sd.begin(), sd.end()) : *std::max_element(bd.begin(), bd.end());
      if (margin > 0 && worst < margin * margin * kMarginSafety) return;
      previous = range;
      for (std::size_t k = 0; k < d; ++k) {
        if (range[k][0] > 0) --range[k][0];
        if (range[k][1] + 1 < B) ++range[k][1];
      }
    }
  }

  std::vector<double> bd, bi, sd, si;

 private:
  const IntegrationGrid& grid_;
  const NucleusBuckets& nb_;
  const simd::KernelTable& kt_;
};

// Runs the search over all tiles and hands each finished tile to
// sink(tile, bi, si).
template <bool Two, class Sink>
void classify(const IntegrationGrid& grid, const Configuration& X, Sink&& sink) {
  const std::size_t d = grid.dim();
  require(X.width() == d, ErrorCode::DimensionMismatch, "configuration dimension does not match the grid");
  require(X.size() >= 1, ErrorCode::EmptyConfiguration, "Voronoi classification needs at least one nucleus");
  require(X.size() < kNoNucleus, ErrorCode::InvalidArgument, "too many nuclei");
  const NucleusBuckets nb(X, d, grid.side());
  const auto& tiles = grid.tiles();
  const std::size_t chunks = (tiles.size() + kTilesPerChunk - 1) / kTilesPerChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    TileSearcher searcher(grid, nb);
    const std::size_t t_end = std::min(tiles.size(), (chunk + 1) * kTilesPerChunk);
    for (std::size_t t = chunk * kTilesPerChunk; t < t_end; ++t) {
      searcher.search<Two>(tiles[t]);
      sink(tiles[t], searcher.bi.data(), Two ? searcher.si.data() : nullptr);
    }
  });
}

inline double squared_distance(const IntegrationGrid& grid, std::size_t p, const double* c) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    const double diff = grid.coord(p, k) - c[k];
    d2 = d2 + diff * diff;
  }
  return d2;
}

double box_distance(const IntegrationGrid::Tile& t, const double* q, std::size_t d) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double e = std::max({t.lo[k] - q[k], 0.0, q[k] - t.hi[k]});
    d2 += e * e;
  }
  return std::sqrt(d2);
}

double box_diameter(const IntegrationGrid::Tile& t, std::size_t d) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) d2 += (t.hi[k] - t.lo[k]) * (t.hi[k] - t.lo[k]);
  return std::sqrt(d2);
}

// Breadth-first walk over tiles starting at the tiles of the given sites.
// For every visited tile the nearest (Two: and second-nearest) nucleus among
// `others` is computed, on_tile(tile, searcher) consumes it, and the walk
// continues to adjacent tiles when the tile could hold a point at least as
// close to a site as to its nearest (Two: second-nearest) other nucleus.
// Each such region is a union of convex sets containing the site, so tiles
// meeting it form a connected set, and for any p' in the tile the relevant
// distance is at most min_p d(p) + diam(tile).
template <bool Two, class OnTile>
void flood(const IntegrationGrid& grid, const NucleusBuckets& others, std::span<const double* const> sites,
           OnTile&& on_tile) {
  const std::size_t d = grid.dim();
  TileSearcher searcher(grid, others);
  const auto& tiles = grid.tiles();
  std::vector<std::uint8_t> seen(tiles.size(), 0);
  std::vector<std::size_t> queue;
  auto push = [&](std::size_t t) {
    if (!seen[t]) seen[t] = 1, queue.push_back(t);
  };
  for (const double* q : sites) push(grid.tile_of(q));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto& tile = tiles[queue[head]];
    searcher.search<Two>(tile);
    on_tile(tile, searcher);
    const auto& dist = Two ? searcher.sd : searcher.bd;
    const double closest = *std::min_element(dist.begin(), dist.end());
    const double reach = (std::sqrt(closest) + box_diameter(tile, d)) * (1 + 1e-9) + 1e-12;
    for (const double* q : sites)
      if (box_distance(tile, q, d) <= reach) {
        grid.for_each_adjacent_tile(queue[head], push);
        break;
      }
  }
}

inline bool before(double da, double ia, double db, double ib) { return da < db || (da == db && ia < ib); }

// count(y) - count(y'), where y' is y with nucleus j moved to `moved` (or
// deleted when moved == nullptr). Only grid points in the old or the new cell
// of j can change owner.
std::int64_t local_count_change(const IntegrationGrid& grid, const Configuration& y, std::span<const std::uint8_t> flag,
                                std::size_t j, const double* moved, bool moved_in) {
  const NucleusBuckets others(y, grid.dim(), grid.side(), j);
  const double* old = y[j].data();
  const auto jd = static_cast<double>(j);
  const bool old_in = flag[j] != 0;
  std::array<const double*, 2> sites{old, moved};
  std::int64_t change = 0;
  flood<false>(grid, others, std::span<const double* const>(sites.data(), moved ? 2 : 1),
               [&](const IntegrationGrid::Tile& tile, const TileSearcher& s) {
                 for (std::size_t p = tile.begin; p < tile.end; ++p) {
                   const double dn = s.bd[p - tile.begin], in = s.bi[p - tile.begin];
                   const bool other_in = in >= 0 && flag[static_cast<std::size_t>(in)] != 0;
                   const bool was_j = before(squared_distance(grid, p, old), jd, dn, in);
                   const bool is_j = moved && before(squared_distance(grid, p, moved), jd, dn, in);
                   change += static_cast<std::int64_t>(was_j ? old_in : other_in) -
                             static_cast<std::int64_t>(is_j ? moved_in : other_in);
                 }
               });
  return change;
}

// Grid points owned by nucleus i.
std::vector<std::size_t> local_cell(const IntegrationGrid& grid, const Configuration& X, std::size_t i) {
  const NucleusBuckets others(X, grid.dim(), grid.side(), i);
  const double* q = X[i].data();
  const auto id = static_cast<double>(i);
  std::vector<std::size_t> out;
  flood<false>(grid, others, std::span<const double* const>(&q, 1),
               [&](const IntegrationGrid::Tile& tile, const TileSearcher& s) {
                 for (std::size_t p = tile.begin; p < tile.end; ++p)
                   if (before(squared_distance(grid, p, q), id, s.bd[p - tile.begin], s.bi[p - tile.begin]))
                     out.push_back(p);
               });
  return out;
}

// Neighbours of nucleus i in the grid adjacency: the other member of every
// {nearest, second} pair that contains i.
std::vector<std::uint32_t> local_neighbors(const IntegrationGrid& grid, const Configuration& X, std::size_t i) {
  const NucleusBuckets others(X, grid.dim(), grid.side(), i);
  const double* q = X[i].data();
  const auto id = static_cast<double>(i);
  std::vector<std::uint32_t> out;
  flood<true>(grid, others, std::span<const double* const>(&q, 1),
              [&](const IntegrationGrid::Tile& tile, const TileSearcher& s) {
                for (std::size_t p = tile.begin; p < tile.end; ++p) {
                  const std::size_t r = p - tile.begin;
                  if (s.bi[r] < 0) continue;
                  if (before(squared_distance(grid, p, q), id, s.sd[r], s.si[r]))
                    out.push_back(static_cast<std::uint32_t>(s.bi[r]));
                }
              });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Cells of a 1-d configuration: [lo_i, hi_i] per index (empty for duplicates
// that lose the tie to a lower index).
std::vector<std::pair<double, double>> cells_1d(const Configuration& X) {
  const std::size_t n = X.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X[a][0] < X[b][0]; });
  std::vector<std::pair<double, double>> cells(n, {0.0, 0.0});
  // distinct positions; the lowest index at each position owns the cell
  std::vector<std::size_t> owners;
  for (std::size_t r = 0; r < n; ++r)
    if (owners.empty() || X[order[r]][0] != X[owners.back()][0]) owners.push_back(order[r]);
  for (std::size_t r = 0; r < owners.size(); ++r) {
    const double x = X[owners[r]][0];
    const double lo = r == 0 ? 0.0 : 0.5 * (X[owners[r - 1]][0] + x);
    const double hi = r + 1 == owners.size() ? 1.0 : 0.5 * (x + X[owners[r + 1]][0]);
    cells[owners[r]] = {lo, hi};
  }
  return cells;
}

}  // namespace

CellAssignment assign_cells(const IntegrationGrid& grid, const Configuration& X, bool with_second) {
  CellAssignment a;
  a.nearest.resize(grid.size());
  if (with_second) a.second.resize(grid.size());
  auto store = [&](const IntegrationGrid::Tile& tile, const double* bi, const double* si) {
    for (std::size_t p = tile.begin; p < tile.end; ++p) {
      a.nearest[p] = static_cast<std::uint32_t>(bi[p - tile.begin]);
      if (si) a.second[p] = si[p - tile.begin] < 0 ? kNoNucleus : static_cast<std::uint32_t>(si[p - tile.begin]);
    }
  };
  if (with_second)
    classify<true>(grid, X, store);
  else
    classify<false>(grid, X, store);
  return a;
}

std::uint64_t count_cells(const IntegrationGrid& grid, const Configuration& X, std::span<const std::uint8_t> flag) {
  const std::size_t chunks = (grid.tiles().size() + kTilesPerChunk - 1) / kTilesPerChunk;
  std::vector<std::uint64_t> partial(chunks, 0);
  classify<false>(grid, X, [&](const IntegrationGrid::Tile& tile, const double* bi, const double*) {
    std::uint64_t c = 0;
    for (std::size_t p = 0; p < tile.end - tile.begin; ++p) c += flag[static_cast<std::size_t>(bi[p])];
    partial[(&tile - grid.tiles().data()) / kTilesPerChunk] += c;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

std::vector<std::uint8_t> membership(const ShapeSet& K, const Configuration& X) {
  require(X.width() == static_cast<std::size_t>(K.dim()), ErrorCode::DimensionMismatch,
          "shape and configuration dimensions differ");
  std::vector<std::uint8_t> flag(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) flag[i] = K.contains(X[i]) ? 1 : 0;
  return flag;
}

double voronoi_volume(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid) {
  require(!X.empty(), ErrorCode::EmptyConfiguration, "voronoi_volume needs n >= 1");
  require(grid.dim() == static_cast<std::size_t>(K.dim()), ErrorCode::DimensionMismatch, "grid and shape differ");
  const auto flag = membership(K, X);
  return static_cast<double>(count_cells(grid, X, flag)) / static_cast<double>(grid.size());
}

double voronoi_volume_exact_1d(const ShapeSet& K, const Configuration& X) {
  require(K.dim() == 1 && X.width() == 1, ErrorCode::DimensionMismatch, "exact Voronoi volume needs d = 1");
  require(!X.empty(), ErrorCode::EmptyConfiguration, "voronoi_volume needs n >= 1");
  const auto cells = cells_1d(X);
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (K.contains(X[i])) total += cells[i].second - cells[i].first;
  return total;
}

VoronoiVolume::VoronoiVolume(ShapeSet K, std::shared_ptr<const IntegrationGrid> grid)
    : K_(std::move(K)), grid_(std::move(grid)) {
  require(grid_ && grid_->dim() == static_cast<std::size_t>(K_.dim()), ErrorCode::DimensionMismatch,
          "grid and shape dimensions differ");
}

std::uint64_t VoronoiVolume::count(const Configuration& y) const {
  if (y.empty()) return 0;
  const auto flag = membership(K_, y);
  return count_cells(*grid_, y, flag);
}

double VoronoiVolume::evaluate(const Configuration& y) const {
  return static_cast<double>(count(y)) / static_cast<double>(grid_->size());
}

double VoronoiVolume::replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const {
  require(j < y.size(), ErrorCode::IndexOutOfRange, "replacement index out of range");
  const auto flag = membership(K_, y);
  const std::int64_t change = y.size() == 1
      ? static_cast<std::int64_t>(grid_->size()) * (flag[0] - static_cast<int>(K_.contains(value)))
      : local_count_change(*grid_, y, flag, j, value.data(), K_.contains(value));
  return static_cast<double>(change) / static_cast<double>(grid_->size());
}

double VoronoiVolume::delete_difference(const Configuration& y, std::size_t i) const {
  require(i < y.size(), ErrorCode::IndexOutOfRange, "deletion index out of range");
  const auto flag = membership(K_, y);
  const std::int64_t change = y.size() == 1 ? static_cast<std::int64_t>(grid_->size()) * flag[0]
                                            : local_count_change(*grid_, y, flag, i, nullptr, false);
  return static_cast<double>(change) / static_cast<double>(grid_->size());
}

VoronoiVolumeExact1d::VoronoiVolumeExact1d(ShapeSet K) : K_(std::move(K)) {
  require(K_.dim() == 1, ErrorCode::DimensionMismatch, "exact Voronoi volume needs d = 1");
}

double VoronoiVolumeExact1d::evaluate(const Configuration& y) const {
  return y.empty() ? 0.0 : voronoi_volume_exact_1d(K_, y);
}

FunctionalFactory voronoi_factory(ShapeSet K, std::size_t m) {
  return [K = std::move(K), m](RandomStream& integration) -> FunctionalPtr {
    auto grid = std::make_shared<const IntegrationGrid>(
        IntegrationGrid::stratified(static_cast<std::size_t>(K.dim()), m, integration));
    return std::make_shared<VoronoiVolume>(K, std::move(grid));
  };
}

std::vector<std::size_t> CellGraph::distances_from(std::size_t i) const {
  std::vector<std::size_t> dist(neighbors.size(), std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue{i};
  dist[i] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::uint32_t v : neighbors[u])
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

CellGraph cell_graph(const CellAssignment& a, std::size_t n) {
  require(a.second.size() == a.nearest.size(), ErrorCode::InvalidArgument, "adjacency needs second-nearest data");
  std::vector<std::uint64_t> edges;
  edges.reserve(a.nearest.size());
  for (std::size_t p = 0; p < a.nearest.size(); ++p) {
    if (a.second[p] == kNoNucleus) continue;
    const std::uint64_t lo = std::min(a.nearest[p], a.second[p]), hi = std::max(a.nearest[p], a.second[p]);
    edges.push_back(lo << 32 | hi);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  CellGraph g;
  g.neighbors.resize(n);
  for (std::uint64_t e : edges) {
    const auto lo = static_cast<std::uint32_t>(e >> 32), hi = static_cast<std::uint32_t>(e & 0xffffffffu);
    g.neighbors[lo].push_back(hi);
    g.neighbors[hi].push_back(lo);
  }
  for (auto& list : g.neighbors) std::sort(list.begin(), list.end());
  return g;
}

namespace {

// Distance from x to the far corner of the stratum of grid point p.
double far_corner(const IntegrationGrid& grid, std::span<const double> x, std::size_t p) {
  const double h = grid.spacing();
  double d2 = 0.0;
  for (std::size_t k = 0; k < grid.dim(); ++k) {
    const double lo = grid.stratum_lo(p, k);
    const double e = std::max(std::abs(x[k] - lo), std::abs(lo + h - x[k]));
    d2 += e * e;
  }
  return std::sqrt(d2);
}

}  // namespace

std::vector<double> cell_radii(const IntegrationGrid& grid, const Configuration& X, const CellAssignment& a) {
  std::vector<double> r(X.size(), 0.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const std::size_t i = a.nearest[p];
    r[i] = std::max(r[i], far_corner(grid, X[i], p));
  }
  return r;
}

double voronoi_radius(const IntegrationGrid& grid, const Configuration& X, const CellAssignment& a,
                      const CellGraph& g, std::size_t i, int k) {
  require(k >= 0 && k <= 2, ErrorCode::InvalidArgument, "radius order must be 0, 1 or 2");
  require(i < X.size(), ErrorCode::IndexOutOfRange, "nucleus index out of range");
  const auto dist = g.distances_from(i);
  if (k > 0 && std::find(dist.begin(), dist.end(), static_cast<std::size_t>(k)) == dist.end())
    return std::sqrt(static_cast<double>(grid.dim()));
  double r = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (dist[a.nearest[p]] <= static_cast<std::size_t>(k)) r = std::max(r, far_corner(grid, X[i], p));
  return r;
}

double voronoi_radius(const IntegrationGrid& grid, const Configuration& X, std::size_t i, int k) {
  require(k >= 0 && k <= 2, ErrorCode::InvalidArgument, "radius order must be 0, 1 or 2");
  require(i < X.size(), ErrorCode::IndexOutOfRange, "nucleus index out of range");
  require(X.width() == grid.dim(), ErrorCode::DimensionMismatch, "configuration dimension does not match the grid");
  // hop distances up to k, found from locally computed neighbour lists
  std::vector<std::size_t> frontier{i}, reached{i};
  std::vector<std::uint8_t> seen(X.size(), 0);
  seen[i] = 1;
  for (int hop = 1; hop <= k; ++hop) {
    std::vector<std::size_t> next;
    for (std::size_t u : frontier)
      for (std::uint32_t v : local_neighbors(grid, X, u))
        if (!seen[v]) seen[v] = 1, next.push_back(v);
    if (next.empty()) return std::sqrt(static_cast<double>(grid.dim()));
    reached.insert(reached.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  double r = 0.0;
  for (std::size_t u : reached)
    for (std::size_t p : local_cell(grid, X, u)) r = std::max(r, far_corner(grid, X[i], p));
  return r;
}

DeletionSupport voronoi_deletion_support(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid,
                                         std::size_t i, std::size_t j) {
  require(i != j, ErrorCode::DuplicateIndex, "deletion support needs i != j");
  require(i < X.size() && j < X.size(), ErrorCode::IndexOutOfRange, "index out of range");
  const VoronoiVolume phi(K, std::make_shared<const IntegrationGrid>(grid));
  const auto c = [&](const Configuration& y) { return static_cast<std::int64_t>(phi.count(y)); };
  const std::int64_t full = c(X), no_i = c(X.without(i)), no_j = c(X.without(j)), no_ij = c(X.without(i, j));
  const double m = static_cast<double>(grid.size());
  DeletionSupport s;
  s.d_i = static_cast<double>(full - no_i) / m;
  s.d_ij = static_cast<double>(full - no_i - no_j + no_ij) / m;
  s.d_i_nonzero = full != no_i;
  s.d_ij_nonzero = full - no_i - no_j + no_ij != 0;
  const auto a = assign_cells(grid, X, true);
  const auto g = cell_graph(a, X.size());
  const bool inside = K.contains(X[i]);
  s.neighbors_same_side = std::all_of(g.neighbors[i].begin(), g.neighbors[i].end(),
                                      [&](std::uint32_t v) { return K.contains(X[v]) == inside; });
  s.graph_distance = g.distances_from(i)[j];
  return s;
}

double add_one_residual(const ShapeSet& K, const Configuration& X, std::span<const double> x,
                        const IntegrationGrid& grid) {
  Configuration Xx = X;
  Xx.push_back(x);
  const VoronoiVolume phi(K, std::make_shared<const IntegrationGrid>(grid));
  const auto lhs = static_cast<std::int64_t>(phi.count(Xx)) - static_cast<std::int64_t>(phi.count(X));
  // v(x, y; X) counts grid points that move from the cell of y to the cell of x
  const auto before = assign_cells(grid, X, false);
  const auto after = assign_cells(grid, Xx, false);
  const auto flag = membership(K, X);
  const bool x_in = K.contains(x);
  const auto n = static_cast<std::uint32_t>(X.size());
  std::int64_t rhs = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (after.nearest[p] != n) continue;
    const bool y_in = flag[before.nearest[p]] != 0;
    if (x_in && !y_in) ++rhs;
    if (!x_in && y_in) --rhs;
  }
  return static_cast<double>(std::abs(lhs - rhs)) / static_cast<double>(grid.size());
}

double add_one_residual_exact_1d(const ShapeSet& K, const Configuration& X, double x) {
  require(K.dim() == 1 && X.width() == 1, ErrorCode::DimensionMismatch, "exact add-one check needs d = 1");
  Configuration Xx = X;
  const double xv[] = {x};
  Xx.push_back(xv);
  const double lhs = voronoi_volume_exact_1d(K, Xx) - voronoi_volume_exact_1d(K, X);
  const auto old_cells = cells_1d(X);
  const auto after = cells_1d(Xx);
  const auto [x0, x1] = after.back();
  const bool x_in = K.contains(xv);
  double rhs = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const bool y_in = K.contains(X[i]);
    if (x_in == y_in) continue;
    // part of the old cell of y taken over by x
    const double lo = std::max(x0, old_cells[i].first), hi = std::min(x1, old_cells[i].second);
    if (hi > lo) rhs += x_in ? (hi - lo) : -(hi - lo);
  }
  return std::abs(lhs - rhs);
}

double rho_n(std::size_t n, int d, double eps) {
  require(eps > 0, ErrorCode::InvalidArgument, "epsilon' must be positive");
  return std::pow(std::log(static_cast<double>(n)), 1.0 / d + eps);
}

bool max_cell_radius_event(const IntegrationGrid& grid, const Configuration& X, double rho) {
  const auto a = assign_cells(grid, X, false);
  const auto r = cell_radii(grid, X, a);
  const double bound = std::pow(static_cast<double>(X.size()), -1.0 / static_cast<double>(grid.dim())) * rho;
  return *std::max_element(r.begin(), r.end()) <= bound;
}

double boundary_radius_moment(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid, int k) {
  const double r = voronoi_radius(grid, X, 0, k);
  if (K.distance_to_boundary(X[0]) > r) return 0.0;
  return std::pow(r, static_cast<double>(grid.dim()));
}

}  // namespace bebp
