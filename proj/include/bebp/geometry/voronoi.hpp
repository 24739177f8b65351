#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "bebp/core/configuration.hpp"
#include "bebp/core/functional.hpp"
#include "bebp/geometry/grid.hpp"
#include "bebp/geometry/shape.hpp"

namespace bebp {

inline constexpr std::uint32_t kNoNucleus = std::numeric_limits<std::uint32_t>::max();

// Nearest and (optionally) second-nearest nucleus of every grid point, with
// ties broken by the lowest index. `second` is kNoNucleus when n = 1.
struct CellAssignment {
  std::vector<std::uint32_t> nearest;
  std::vector<std::uint32_t> second;
};

CellAssignment assign_cells(const IntegrationGrid& grid, const Configuration& X, bool with_second);

// Number of grid points whose nearest nucleus i has flag[i] != 0.
std::uint64_t count_cells(const IntegrationGrid& grid, const Configuration& X, std::span<const std::uint8_t> flag);

std::vector<std::uint8_t> membership(const ShapeSet& K, const Configuration& X);

// Grid measure of the union of the Voronoi cells of the nuclei lying in K.
double voronoi_volume(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid);
// Exact measure in d = 1, where cells are intervals bounded by midpoints.
double voronoi_volume_exact_1d(const ShapeSet& K, const Configuration& X);

// φ as a functional on a fixed grid. The empty configuration has no cells, so
// φ(∅) = 0; deletions down to the empty set stay well defined.
class VoronoiVolume final : public Functional {
 public:
  VoronoiVolume(ShapeSet K, std::shared_ptr<const IntegrationGrid> grid);

  std::string name() const override { return "voronoi-volume"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }
  double replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const override;
  double delete_difference(const Configuration& y, std::size_t i) const override;

  std::uint64_t count(const Configuration& y) const;
  const ShapeSet& shape() const { return K_; }
  const IntegrationGrid& grid() const { return *grid_; }

 private:
  ShapeSet K_;
  std::shared_ptr<const IntegrationGrid> grid_;
};

// Exact d = 1 version of the same functional.
class VoronoiVolumeExact1d final : public Functional {
 public:
  explicit VoronoiVolumeExact1d(ShapeSet K);
  std::string name() const override { return "voronoi-volume-exact"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }

 private:
  ShapeSet K_;
};

// Builds φ with a fresh stratified grid of about m points per replication.
FunctionalFactory voronoi_factory(ShapeSet K, std::size_t m);

// Voronoi adjacency read off the grid: nuclei a and b are neighbours when some
// grid point has {nearest, second} = {a, b}.
struct CellGraph {
  std::vector<std::vector<std::uint32_t>> neighbors;

  // Hop distance from i to every nucleus (SIZE_MAX when unreachable).
  std::vector<std::size_t> distances_from(std::size_t i) const;
};

CellGraph cell_graph(const CellAssignment& a, std::size_t n);

// R_0 for every nucleus: the largest distance from the nucleus to the far
// corner of a stratum assigned to it, so each cell volume is at most κ_d R_0^d.
std::vector<double> cell_radii(const IntegrationGrid& grid, const Configuration& X, const CellAssignment& a);

// R_k(X_i; X) for k in {0, 1, 2}: the radius over the cells at hop distance at
// most k from X_i (direct neighbours are at distance 1). When X_i has no
// neighbour at distance exactly k the value is √d.
double voronoi_radius(const IntegrationGrid& grid, const Configuration& X, std::size_t i, int k);
double voronoi_radius(const IntegrationGrid& grid, const Configuration& X, const CellAssignment& a,
                      const CellGraph& g, std::size_t i, int k);

struct DeletionSupport {
  double d_i = 0.0;   // D_i φ(X)
  double d_ij = 0.0;  // D_{ij} φ(X)
  bool d_i_nonzero = false;
  bool d_ij_nonzero = false;
  // Every neighbour of X_i lies on the same side of K as X_i.
  bool neighbors_same_side = false;
  std::size_t graph_distance = 0;
};

DeletionSupport voronoi_deletion_support(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid,
                                         std::size_t i, std::size_t j);

// |φ(X,x) - φ(X) - [1{x∈K} Σ_{y∈X\K} v(x,y;X) - 1{x∉K} Σ_{y∈X∩K} v(x,y;X)]|
// where v(x,y;X) is the measure that the cell of y loses when x is added.
double add_one_residual(const ShapeSet& K, const Configuration& X, std::span<const double> x,
                        const IntegrationGrid& grid);
double add_one_residual_exact_1d(const ShapeSet& K, const Configuration& X, double x);

// ρ_n = log(n)^{1/d + ε'}.
double rho_n(std::size_t n, int d, double eps);
// Whether max_j R_0(X_j; X) <= n^{-1/d} ρ.
bool max_cell_radius_event(const IntegrationGrid& grid, const Configuration& X, double rho);

// U_k = 1{d(X_1, ∂K) <= R_k(X_1; X)} R_k(X_1; X)^d.
double boundary_radius_moment(const ShapeSet& K, const Configuration& X, const IntegrationGrid& grid, int k);

}  // namespace bebp
