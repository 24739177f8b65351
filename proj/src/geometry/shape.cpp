#include "bebp/geometry/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bebp/core/error.hpp"

namespace bebp {

namespace {

constexpr int kVertexBits = 30;  // vertices live on the 2^-30 lattice
constexpr int kQueryBits = 60;   // queries are floored to the 2^-60 lattice
constexpr std::size_t kSlabs = 64;

using i128 = __int128;

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace

// Even-odd point-in-polygon on integer vertices. Edges are bucketed by
// horizontal slab so a query touches only the edges that can cross its row.
struct ShapeSet::Polygon {
  std::vector<std::int64_t> x, y;  // scaled by 2^30
  std::vector<std::vector<std::uint32_t>> slabs;
  double area = 0.0;

  explicit Polygon(const std::vector<std::pair<double, double>>& pts) {
    for (const auto& [px, py] : pts) {
      x.push_back(std::llround(std::ldexp(px, kVertexBits)));
      y.push_back(std::llround(std::ldexp(py, kVertexBits)));
    }
    slabs.resize(kSlabs);
    const std::size_t n = x.size();
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t f = (e + 1) % n;
      const double y0 = std::ldexp(static_cast<double>(std::min(y[e], y[f])), -kVertexBits);
      const double y1 = std::ldexp(static_cast<double>(std::max(y[e], y[f])), -kVertexBits);
      const auto s0 = static_cast<std::size_t>(std::clamp(y0 * kSlabs, 0.0, kSlabs - 1.0));
      const auto s1 = static_cast<std::size_t>(std::clamp(y1 * kSlabs, 0.0, kSlabs - 1.0));
      for (std::size_t s = s0; s <= s1; ++s) slabs[s].push_back(static_cast<std::uint32_t>(e));
      area += 0.5 * (std::ldexp(static_cast<double>(x[e]), -kVertexBits) *
                         std::ldexp(static_cast<double>(y[f]), -kVertexBits) -
                     std::ldexp(static_cast<double>(x[f]), -kVertexBits) *
                         std::ldexp(static_cast<double>(y[e]), -kVertexBits));
    }
  }

  bool contains(double qx, double qy) const {
    if (!(qy >= 0.0 && qy < 1.0 && qx >= 0.0 && qx < 1.0)) return false;
    const i128 X = static_cast<i128>(std::floor(std::ldexp(qx, kQueryBits)));
    const i128 Y = static_cast<i128>(std::floor(std::ldexp(qy, kQueryBits)));
    constexpr int up = kQueryBits - kVertexBits;
    const std::size_t n = x.size();
    bool inside = false;
    for (std::uint32_t e : slabs[static_cast<std::size_t>(qy * kSlabs)]) {
      const std::size_t f = (e + 1) % n;
      const i128 ax = static_cast<i128>(x[e]) << up, ay = static_cast<i128>(y[e]) << up;
      const i128 bx = static_cast<i128>(x[f]) << up, by = static_cast<i128>(y[f]) << up;
      if ((ay <= Y) == (by <= Y)) continue;  // half-open rule on the crossing row
      const i128 orient = (bx - ax) * (Y - ay) - (by - ay) * (X - ax);
      // crossing lies strictly right of the query
      if ((by > ay) ? orient > 0 : orient < 0) inside = !inside;
    }
    return inside;
  }
};

ShapeSet ShapeSet::ball(std::vector<double> center, double radius) {
  require(!center.empty() && center.size() <= 4, ErrorCode::DimensionMismatch, "ball dimension must be in [1, 4]");
  require(radius > 0, ErrorCode::InvalidArgument, "ball radius must be positive");
  ShapeSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.a_ = std::move(center);
  s.b_ = {radius};
  s.alpha_ = 1.0;
  // Vol(∂K^r) = κ_d((R+r)^d - (R-r)^d) = 2 r d κ_d ξ^{d-1} for some ξ in (R-r, R+r);
  // in d = 2 this is exactly 4πRr, otherwise bracket ξ for r <= R/2
  const double k = 2.0 * s.dim_ * unit_ball_volume(s.dim_);
  s.s_plus_ = s.dim_ == 2 ? 4 * std::numbers::pi * radius : k * std::pow(2.0 * radius, s.dim_ - 1);
  s.s_minus_ = s.dim_ == 2 ? 4 * std::numbers::pi * radius : k * std::pow(0.5 * radius, s.dim_ - 1);
  return s;
}

ShapeSet ShapeSet::box(std::vector<double> lo, std::vector<double> hi) {
  require(lo.size() == hi.size() && !lo.empty() && lo.size() <= 4, ErrorCode::DimensionMismatch, "box bounds");
  for (std::size_t k = 0; k < lo.size(); ++k)
    require(0.0 <= lo[k] && lo[k] < hi[k] && hi[k] <= 1.0, ErrorCode::InvalidArgument, "box must sit in the cube");
  ShapeSet s;
  s.kind_ = Kind::AxisBox;
  s.dim_ = static_cast<int>(lo.size());
  s.a_ = std::move(lo);
  s.b_ = std::move(hi);
  s.alpha_ = 1.0;
  return s;
}

ShapeSet ShapeSet::half_interval(double threshold) {
  require(threshold > 0.0 && threshold < 1.0, ErrorCode::InvalidArgument, "threshold must be in (0,1)");
  ShapeSet s;
  s.kind_ = Kind::HalfInterval;
  s.dim_ = 1;
  s.a_ = {0.0};
  s.b_ = {threshold};
  s.alpha_ = 1.0;
  s.s_plus_ = 2.0;
  s.s_minus_ = 2.0;
  return s;
}

ShapeSet ShapeSet::koch(int depth) {
  require(depth >= 0 && depth <= 7, ErrorCode::InvalidArgument, "Koch depth must be in [0, 7]");
  // counter-clockwise triangle; each edge a->b gets an outward (right-hand) bump
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2}};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::pair<double, double>> next;
    for (std::size_t e = 0; e < pts.size(); ++e) {
      const auto [ax, ay] = pts[e];
      const auto [bx, by] = pts[(e + 1) % pts.size()];
      const double dx = (bx - ax) / 3, dy = (by - ay) / 3;
      const double c = 0.5, sn = -std::sqrt(3.0) / 2;  // rotate by -60 degrees
      next.push_back({ax, ay});
      next.push_back({ax + dx, ay + dy});
      next.push_back({ax + dx + c * dx - sn * dy, ay + dy + sn * dx + c * dy});
      next.push_back({ax + 2 * dx, ay + 2 * dy});
    }
    pts = std::move(next);
  }
  double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
  for (const auto& [x, y] : pts) {
    lo_x = std::min(lo_x, x), hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y), hi_y = std::max(hi_y, y);
  }
  const double scale = 0.8 / std::max(hi_x - lo_x, hi_y - lo_y);
  for (auto& [x, y] : pts) {
    x = 0.5 + (x - 0.5 * (lo_x + hi_x)) * scale;
    y = 0.5 + (y - 0.5 * (lo_y + hi_y)) * scale;
  }
  ShapeSet s;
  s.kind_ = Kind::KochFlake;
  s.dim_ = 2;
  s.a_ = {static_cast<double>(depth)};
  s.alpha_ = 2.0 - std::log(4.0) / std::log(3.0);
  s.polygon_ = std::make_shared<Polygon>(pts);
  return s;
}

std::string ShapeSet::name() const {
  switch (kind_) {
    case Kind::Ball: return "ball";
    case Kind::AxisBox: return "box";
    case Kind::KochFlake: return "koch";
    case Kind::HalfInterval: return "half-interval";
  }
  return "?";
}

bool ShapeSet::contains(std::span<const double> x) const {
  switch (kind_) {
    case Kind::Ball: {
      double d2 = 0.0;
      for (int k = 0; k < dim_; ++k) {
        const double diff = x[k] - a_[k];
        d2 = d2 + diff * diff;
      }
      return d2 <= b_[0] * b_[0];
    }
    case Kind::AxisBox:
    case Kind::HalfInterval:
      for (int k = 0; k < dim_; ++k)
        if (x[k] < a_[k] || x[k] > b_[k]) return false;
      return true;
    case Kind::KochFlake: return polygon_->contains(x[0], x[1]);
  }
  return false;
}

double ShapeSet::volume() const {
  switch (kind_) {
    case Kind::Ball: return unit_ball_volume(dim_) * std::pow(b_[0], dim_);
    case Kind::AxisBox:
    case Kind::HalfInterval: {
      double v = 1.0;
      for (int k = 0; k < dim_; ++k) v *= b_[k] - a_[k];
      return v;
    }
    case Kind::KochFlake: return polygon_->area;
  }
  return 0.0;
}

std::vector<std::pair<double, double>> ShapeSet::intervals() const {
  require(dim_ == 1, ErrorCode::DimensionMismatch, "intervals are only defined in d = 1");
  if (kind_ == Kind::Ball) return {{std::max(0.0, a_[0] - b_[0]), std::min(1.0, a_[0] + b_[0])}};
  return {{a_[0], b_[0]}};
}

std::vector<std::pair<double, double>> ShapeSet::polygon() const {
  std::vector<std::pair<double, double>> out;
  if (!polygon_) return out;
  for (std::size_t i = 0; i < polygon_->x.size(); ++i)
    out.push_back({std::ldexp(static_cast<double>(polygon_->x[i]), -kVertexBits),
                   std::ldexp(static_cast<double>(polygon_->y[i]), -kVertexBits)});
  return out;
}

namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

}  // namespace

double ShapeSet::distance_to_boundary(std::span<const double> x) const {
  switch (kind_) {
    case Kind::Ball: {
      double d2 = 0.0;
      for (int k = 0; k < dim_; ++k) d2 += (x[k] - a_[k]) * (x[k] - a_[k]);
      return std::abs(std::sqrt(d2) - b_[0]);
    }
    case Kind::AxisBox:
    case Kind::HalfInterval: {
      // nearest point on each interior face, clamped to that face
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < dim_; ++k)
        for (int side = 0; side < 2; ++side) {
          const double level = side ? b_[k] : a_[k];
          if (level <= 0.0 || level >= 1.0) continue;
          double d2 = (x[k] - level) * (x[k] - level);
          for (int j = 0; j < dim_; ++j)
            if (j != k) {
              const double c = std::clamp(x[j], a_[j], b_[j]);
              d2 += (x[j] - c) * (x[j] - c);
            }
          best = std::min(best, std::sqrt(d2));
        }
      return best;
    }
    case Kind::KochFlake: {
      const auto& px = polygon_->x;
      const auto& py = polygon_->y;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < px.size(); ++e) {
        const std::size_t f = (e + 1) % px.size();
        best = std::min(best, segment_distance(x[0], x[1], std::ldexp(static_cast<double>(px[e]), -kVertexBits),
                                               std::ldexp(static_cast<double>(py[e]), -kVertexBits),
                                               std::ldexp(static_cast<double>(px[f]), -kVertexBits),
                                               std::ldexp(static_cast<double>(py[f]), -kVertexBits)));
      }
      return best;
    }
  }
  return 0.0;
}

}  // namespace bebp
