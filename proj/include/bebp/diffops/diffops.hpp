#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bebp/core/configuration.hpp"
#include "bebp/core/functional.hpp"

namespace bebp {

// Subset of the 0-based coordinates {0..n-1}, n <= 64.
class SubsetMask {
 public:
  explicit SubsetMask(std::size_t n, std::uint64_t bits = 0);
  static SubsetMask full(std::size_t n);
  static SubsetMask of(std::size_t n, std::span<const std::size_t> members);

  std::size_t n() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool contains(std::size_t i) const { return (bits_ >> i) & 1u; }
  std::size_t size() const;
  std::vector<std::size_t> members() const;
  SubsetMask with(std::size_t i) const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

 private:
  std::size_t n_;
  std::uint64_t bits_;
};

// y with the coordinates in C taken from y'.
Configuration substituted(const Configuration& y, const Configuration& yp, const SubsetMask& c);

double substitute(const Functional& f, const Configuration& y, const Configuration& yp, const SubsetMask& c);
double delta(const Functional& f, const Configuration& y, const Configuration& yp, const SubsetMask& c);

// Iterated difference by the recursive definition: Δ_{i1..ik} f(y,y') is
// Δ_{i1..ik-1} f(y,y') minus the same with y_{ik} replaced by y'_{ik}.
double delta_iterated(const Functional& f, const Configuration& y, const Configuration& yp,
                      std::span<const std::size_t> indices);
// Independent path: sum over A ⊆ B of (-1)^|A| f^A(y,y').
double delta_iterated_inclusion_exclusion(const Functional& f, const Configuration& y, const Configuration& yp,
                                          std::span<const std::size_t> indices);

// |f(y) - f(y') - Σ_{B≠∅} (-1)^|B| Δ_B f(y',y)|, n <= 12.
double telescoping_residual(const Functional& f, const Configuration& y, const Configuration& yp);

// Deletion operators D_i f(y) and D_{i,j} f(y).
double delete_one(const Functional& f, const Configuration& y, std::size_t i);
double delete_two(const Functional& f, const Configuration& y, std::size_t i, std::size_t j);

enum class Source : std::uint8_t { Base, Prime, Tilde };

struct RecombinationSelector {
  std::vector<Source> choices;

  static RecombinationSelector constant(std::size_t n, Source s) { return {std::vector<Source>(n, s)}; }
};

Configuration recombine(const Configuration& x, const Configuration& xp, const Configuration& xt,
                        const RecombinationSelector& sel);

}  // namespace bebp
