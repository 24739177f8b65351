#include "bebp/geometry/nearest_neighbor.hpp"

#include <cmath>
#include <vector>

#include "bebp/core/error.hpp"
#include "bebp/geometry/kdtree.hpp"

namespace bebp {

double nn_average_distance(const Configuration& X) {
  const std::size_t n = X.size();
  require(n >= 2, ErrorCode::TooFewPoints, "nearest-neighbour distance needs n >= 2");
  const KdTree tree(std::vector<double>(X.raw().begin(), X.raw().end()), X.width());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::sqrt(tree.nearest(X[i].data(), i).distance2);
  return total / std::sqrt(static_cast<double>(n));
}

}  // namespace bebp
