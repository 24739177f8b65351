#include "bebp/core/configuration.hpp"

#include <algorithm>

#include "bebp/core/error.hpp"

namespace bebp {

Configuration::Configuration(std::size_t width, std::vector<double> data)
    : width_(width), data_(std::move(data)) {
  require(width_ > 0 && data_.size() % width_ == 0, ErrorCode::InvalidArgument,
          "configuration data is not a whole number of elements");
}

void Configuration::set(std::size_t i, std::span<const double> value) {
  require(value.size() == width_, ErrorCode::DimensionMismatch, "element width mismatch");
  require(i < size(), ErrorCode::IndexOutOfRange, "element index out of range");
  std::copy(value.begin(), value.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * width_));
}

void Configuration::push_back(std::span<const double> value) {
  require(value.size() == width_, ErrorCode::DimensionMismatch, "element width mismatch");
  data_.insert(data_.end(), value.begin(), value.end());
}

Configuration Configuration::without(std::size_t i) const {
  require(i < size(), ErrorCode::IndexOutOfRange, "deletion index out of range");
  Configuration out;
  out.width_ = width_;
  out.data_.reserve(data_.size() - width_);
  out.data_.insert(out.data_.end(), data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(i * width_));
  out.data_.insert(out.data_.end(), data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * width_), data_.end());
  return out;
}

Configuration Configuration::without(std::size_t i, std::size_t j) const {
  require(i != j, ErrorCode::InvalidArgument, "double deletion needs distinct indices");
  const auto hi = std::max(i, j);
  const auto lo = std::min(i, j);
  return without(hi).without(lo);
}

Configuration Configuration::permuted(std::span<const std::size_t> order) const {
  require(order.size() == size(), ErrorCode::LengthMismatch, "permutation length mismatch");
  Configuration out(width_, size());
  for (std::size_t k = 0; k < order.size(); ++k) out.set(k, (*this)[order[k]]);
  return out;
}

}  // namespace bebp
