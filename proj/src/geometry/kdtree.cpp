#include "bebp/geometry/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace bebp {

namespace {
constexpr std::size_t kLeaf = 8;
}

KdTree::KdTree(std::vector<double> points, std::size_t dim) : points_(std::move(points)), dim_(dim) {
  order_.resize(size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) build(0, order_.size());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= kLeaf) return id;
  // split on the widest axis at the median
  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double lo = points_[order_[begin] * dim_ + k], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, points_[order_[i] * dim_ + k]);
      hi = std::max(hi, points_[order_[i] * dim_ + k]);
    }
    if (hi - lo > widest) widest = hi - lo, axis = k;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a * dim_ + axis] < points_[b * dim_ + axis]; });
  const double split = points_[order_[mid] * dim_ + axis];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::size_t node, const double* q, std::size_t exclude, Hit& best) const {
  const Node& nd = nodes_[node];
  if (nd.left == npos) {
    for (std::size_t i = nd.begin; i < nd.end; ++i) {
      const std::size_t p = order_[i];
      if (p == exclude) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const double diff = q[k] - points_[p * dim_ + k];
        d2 = d2 + diff * diff;
      }
      if (d2 < best.distance2 || (d2 == best.distance2 && p < best.index)) best = {p, d2};
    }
    return;
  }
  const double diff = q[nd.axis] - nd.split;
  const std::size_t first = diff < 0 ? nd.left : nd.right;
  const std::size_t second = diff < 0 ? nd.right : nd.left;
  search(first, q, exclude, best);
  // <= so that equal-distance points with lower indices are still visited
  if (diff * diff <= best.distance2) search(second, q, exclude, best);
}

KdTree::Hit KdTree::nearest(const double* q, std::size_t exclude) const {
  Hit best;
  if (!nodes_.empty()) search(0, q, exclude, best);
  return best;
}

}  // namespace bebp
