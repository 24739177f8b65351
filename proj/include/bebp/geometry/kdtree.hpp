#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace bebp {

// Static kd-tree over packed points (dim doubles each).
class KdTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  KdTree(std::vector<double> points, std::size_t dim);

  struct Hit {
    std::size_t index = npos;
    double distance2 = std::numeric_limits<double>::infinity();
  };

  // Nearest point to q other than `exclude`; ties go to the lowest index.
  Hit nearest(const double* q, std::size_t exclude = npos) const;
  std::size_t size() const { return points_.size() / dim_; }

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    std::size_t left = npos, right = npos;
    std::size_t axis = 0;
    double split = 0.0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const double* q, std::size_t exclude, Hit& best) const;

  std::vector<double> points_;
  std::size_t dim_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace bebp
