#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "bebp/core/functional.hpp"
#include "bebp/core/sample_space.hpp"
#include "bebp/geometry/grid.hpp"

namespace bebp {

class RadiusLaw {
 public:
  enum class Kind { Constant, Uniform, Pareto };

  static RadiusLaw constant(double r);
  static RadiusLaw uniform(double a, double b);
  // P(R > t) = (scale / t)^shape for t >= scale.
  static RadiusLaw pareto(double scale, double shape);

  Kind kind() const { return kind_; }
  std::string name() const;
  double draw(RandomStream& stream) const;
  // Whether E R^q < ∞.
  bool finite_moment(double q) const;

 private:
  RadiusLaw(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_, b_;
};

// Boolean-model grains: a uniform center in E_n = [0, n^{1/d}]^d and an i.i.d.
// radius. Elements are packed as (center, radius), width d + 1.
class GermGrainLaw final : public PointLaw {
 public:
  GermGrainLaw(int dim, std::size_t n, RadiusLaw radius);

  int dim() const { return dim_; }
  double side() const { return side_; }
  const RadiusLaw& radius_law() const { return radius_; }
  std::size_t width() const override { return static_cast<std::size_t>(dim_) + 1; }
  void draw(RandomStream& stream, std::span<double> out) const override;

  // E R^{5d} < ∞, needed for the covered volume.
  bool volume_moment_ok() const { return radius_.finite_moment(5.0 * dim_); }
  // E R^{8d} < ∞, needed for the isolated-grain count.
  bool isolated_moment_ok() const { return radius_.finite_moment(8.0 * dim_); }

 private:
  int dim_;
  double side_;
  RadiusLaw radius_;
};

// Number of grid points covered by at least one grain.
std::uint64_t covered_count(const IntegrationGrid& grid, const Configuration& grains);
// f_V: grid measure of the union of grains inside E_n.
double covering_volume(const IntegrationGrid& grid, const Configuration& grains);
// f_I: grains that meet no other grain. Two grains with centers in the convex
// set E_n meet inside E_n exactly when |c_i - c_j| <= r_i + r_j.
std::size_t isolated_count(const Configuration& grains, int dim);

class CoveringVolume final : public Functional {
 public:
  explicit CoveringVolume(std::shared_ptr<const IntegrationGrid> grid);
  std::string name() const override { return "covering-volume"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }
  double replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const override;
  double delete_difference(const Configuration& y, std::size_t i) const override;

 private:
  std::shared_ptr<const IntegrationGrid> grid_;
};

class IsolatedCount final : public Functional {
 public:
  explicit IsolatedCount(int dim) : dim_(dim) {}
  std::string name() const override { return "isolated-count"; }
  double evaluate(const Configuration& y) const override {
    return static_cast<double>(isolated_count(y, dim_));
  }
  bool symmetric() const override { return true; }

 private:
  int dim_;
};

// Grid over E_n with about density * n points, redrawn per replication.
FunctionalFactory covering_volume_factory(int dim, std::size_t n, double density = 100.0);

}  // namespace bebp
