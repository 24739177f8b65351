#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bebp {

// An ordered n-tuple of sample-space elements stored flat: every element is a
// fixed-width run of doubles (1 for an alphabet symbol index, d for a cube
// point, d+1 for a grain). Identity is exact bitwise equality.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t width, std::size_t count) : width_(width), data_(width * count) {}
  Configuration(std::size_t width, std::vector<double> data);

  std::size_t size() const { return width_ == 0 ? 0 : data_.size() / width_; }
  std::size_t width() const { return width_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * width_, width_};
  }
  std::span<double> element(std::size_t i) { return {data_.data() + i * width_, width_}; }

  void set(std::size_t i, std::span<const double> value);
  void push_back(std::span<const double> value);

  // Copy with the i-th element removed.
  Configuration without(std::size_t i) const;
  // Copy with elements i and j removed.
  Configuration without(std::size_t i, std::size_t j) const;
  Configuration permuted(std::span<const std::size_t> order) const;

  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<double> data_;
};

}  // namespace bebp
