#include "bebp/core/functional.hpp"

#include <algorithm>
#include <limits>

#include "bebp/core/error.hpp"

namespace bebp {

double Functional::replace_difference(const Configuration& y, std::size_t j,
                                      std::span<const double> value) const {
  Configuration swapped = y;
  swapped.set(j, value);
  return evaluate(y) - evaluate(swapped);
}

double Functional::delete_difference(const Configuration& y, std::size_t i) const {
  require(variable_length(), ErrorCode::FixedArityFunctional, name() + " has a fixed arity");
  return evaluate(y) - evaluate(y.without(i));
}

void check_arity(const Functional& f, const Configuration& y) {
  if (const auto n = f.arity(); n && *n != y.size()) {
    fail(ErrorCode::ArityMismatch, f.name() + " expects " + std::to_string(*n) + " elements, got " +
                                       std::to_string(y.size()));
  }
}

namespace functionals {

double Sum::evaluate(const Configuration& y) const {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += y[i][0];
  return scale_ * total;
}

double Sum::replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const {
  return scale_ * (y[j][0] - value[0]);
}

double Sum::delete_difference(const Configuration& y, std::size_t i) const { return scale_ * y[i][0]; }

double Max::evaluate(const Configuration& y) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) best = std::max(best, y[i][0]);
  return best;
}

double Product::evaluate(const Configuration& y) const { return y[0][0] * y[1][0]; }

double PairwiseProducts::evaluate(const Configuration& y) const {
  // sum_{i<j} a_i a_j = ((sum a)^2 - sum a^2) / 2 is not exact; use the O(n^2) form.
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j) total += y[i][0] * y[j][0];
  return scale_ * total;
}

Table::Table(const Distribution& dist, std::size_t n, std::vector<double> values)
    : symbol_values_(dist.space().alphabet().values), n_(n), values_(std::move(values)) {
  std::size_t expected = 1;
  for (std::size_t i = 0; i < n; ++i) expected *= symbol_values_.size();
  require(values_.size() == expected, ErrorCode::LengthMismatch, "table size must be |E|^n");
}

Table Table::random(const Distribution& dist, std::size_t n, RandomStream& stream) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < n; ++i) size *= dist.space().alphabet_size();
  std::vector<double> values(size);
  for (auto& v : values) v = stream.normal();
  return Table(dist, n, std::move(values));
}

double Table::evaluate(const Configuration& y) const {
  check_arity(*this, y);
  std::size_t index = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const auto it = std::find(symbol_values_.begin(), symbol_values_.end(), y[i][0]);
    require(it != symbol_values_.end(), ErrorCode::InvalidArgument, "value outside the alphabet");
    index = index * symbol_values_.size() + static_cast<std::size_t>(it - symbol_values_.begin());
  }
  return values_[index];
}

}  // namespace functionals

}  // namespace bebp

namespace bebp {

FunctionalFactory fixed_functional(FunctionalPtr f) {
  return [f = std::move(f)](RandomStream&) { return f; };
}

}  // namespace bebp
