#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bebp {

// A subset K of [0,1]^d given by an exact membership test plus boundary
// metadata: Vol(∂K^r) is between S_-(K) r^α and S_+(K) r^α.
class ShapeSet {
 public:
  enum class Kind { Ball, AxisBox, KochFlake, HalfInterval };

  static ShapeSet ball(std::vector<double> center, double radius);
  static ShapeSet box(std::vector<double> lo, std::vector<double> hi);
  // Koch snowflake at the given depth, centred in the unit square.
  static ShapeSet koch(int depth = 4);
  // [0, threshold] in d = 1.
  static ShapeSet half_interval(double threshold);

  Kind kind() const { return kind_; }
  std::string name() const;
  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  std::optional<double> s_plus() const { return s_plus_; }
  std::optional<double> s_minus() const { return s_minus_; }

  bool contains(std::span<const double> x) const;
  // Lebesgue measure of K.
  double volume() const;
  // d = 1: K as a union of closed intervals.
  std::vector<std::pair<double, double>> intervals() const;
  // Euclidean distance from x to the boundary of K relative to the unit cube
  // (faces lying on the cube boundary do not count). Balls are assumed to lie
  // inside the cube.
  double distance_to_boundary(std::span<const double> x) const;

  // Koch polygon vertices (counter-clockwise, unit-square coordinates).
  std::vector<std::pair<double, double>> polygon() const;

 private:
  struct Polygon;

  ShapeSet() = default;

  Kind kind_ = Kind::Ball;
  int dim_ = 1;
  double alpha_ = 1.0;
  std::optional<double> s_plus_, s_minus_;
  std::vector<double> a_, b_;  // ball: center, {radius}; box: lo, hi
  std::shared_ptr<const Polygon> polygon_;
};

}  // namespace bebp
