#pragma once

#include "bebp/core/functional.hpp"

namespace bebp {

// n^{-1/2} Σ_i |X_i - nearest other point|.
double nn_average_distance(const Configuration& X);

class NearestNeighborDistance final : public Functional {
 public:
  std::string name() const override { return "nn-distance"; }
  double evaluate(const Configuration& y) const override { return nn_average_distance(y); }
  bool symmetric() const override { return true; }
};

}  // namespace bebp
