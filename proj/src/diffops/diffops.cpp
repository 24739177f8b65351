#include "bebp/diffops/diffops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bebp/core/error.hpp"

namespace bebp {

SubsetMask::SubsetMask(std::size_t n, std::uint64_t bits) : n_(n), bits_(bits) {
  require(n <= 64, ErrorCode::ArityTooLarge, "subset masks hold at most 64 coordinates");
  require(n == 64 || (bits >> n) == 0, ErrorCode::IndexOutOfRange, "subset member beyond n");
}

SubsetMask SubsetMask::full(std::size_t n) { return SubsetMask(n, n == 64 ? ~0ull : ((1ull << n) - 1)); }

SubsetMask SubsetMask::of(std::size_t n, std::span<const std::size_t> members) {
  SubsetMask m(n);
  for (std::size_t i : members) m = m.with(i);
  return m;
}

std::size_t SubsetMask::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> SubsetMask::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

SubsetMask SubsetMask::with(std::size_t i) const {
  require(i < n_, ErrorCode::IndexOutOfRange, "index " + std::to_string(i) + " outside [0, n)");
  return SubsetMask(n_, bits_ | (1ull << i));
}

namespace {

void check_pair(const Functional& f, const Configuration& y, const Configuration& yp) {
  require(y.size() == yp.size() && y.width() == yp.width(), ErrorCode::ArityMismatch,
          "y and y' must have equal length");
  check_arity(f, y);
}

void check_indices(std::span<const std::size_t> indices, std::size_t n) {
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= n) fail(ErrorCode::ArityMismatch, "index outside the arity");
    for (std::size_t b = 0; b < a; ++b)
      if (indices[a] == indices[b]) fail(ErrorCode::DuplicateIndex, "repeated index in iterated difference");
  }
}

double iterate(const Functional& f, Configuration& y, const Configuration& yp, std::span<const std::size_t> idx) {
  if (idx.size() == 1) return f.replace_difference(y, idx[0], yp[idx[0]]);
  const auto head = idx.first(idx.size() - 1);
  const std::size_t last = idx.back();
  const double before = iterate(f, y, yp, head);
  const std::vector<double> saved(y[last].begin(), y[last].end());
  y.set(last, yp[last]);
  const double after = iterate(f, y, yp, head);
  y.set(last, saved);
  return before - after;
}

}  // namespace

Configuration substituted(const Configuration& y, const Configuration& yp, const SubsetMask& c) {
  require(y.size() == yp.size() && c.n() == y.size(), ErrorCode::ArityMismatch, "length mismatch in substitution");
  Configuration out = y;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (c.contains(i)) out.set(i, yp[i]);
  return out;
}

double substitute(const Functional& f, const Configuration& y, const Configuration& yp, const SubsetMask& c) {
  check_pair(f, y, yp);
  return f.evaluate(substituted(y, yp, c));
}

double delta(const Functional& f, const Configuration& y, const Configuration& yp, const SubsetMask& c) {
  check_pair(f, y, yp);
  if (c.size() == 1) return f.replace_difference(y, c.members()[0], yp[c.members()[0]]);
  return f.evaluate(y) - f.evaluate(substituted(y, yp, c));
}

double delta_iterated(const Functional& f, const Configuration& y, const Configuration& yp,
                      std::span<const std::size_t> indices) {
  check_pair(f, y, yp);
  check_indices(indices, y.size());
  if (indices.empty()) return f.evaluate(y);
  Configuration work = y;
  return iterate(f, work, yp, indices);
}

double delta_iterated_inclusion_exclusion(const Functional& f, const Configuration& y, const Configuration& yp,
                                          std::span<const std::size_t> indices) {
  check_pair(f, y, yp);
  check_indices(indices, y.size());
  const std::size_t k = indices.size();
  require(k <= 20, ErrorCode::ArityTooLarge, "too many indices for inclusion-exclusion");
  double total = 0.0;
  Configuration work = y;
  for (std::uint64_t a = 0; a < (1ull << k); ++a) {
    work = y;
    for (std::size_t b = 0; b < k; ++b)
      if ((a >> b) & 1u) work.set(indices[b], yp[indices[b]]);
    const double v = f.evaluate(work);
    total += (std::popcount(a) % 2 == 0) ? v : -v;
  }
  return total;
}

double telescoping_residual(const Functional& f, const Configuration& y, const Configuration& yp) {
  check_pair(f, y, yp);
  const std::size_t n = y.size();
  require(n <= 12, ErrorCode::ArityTooLarge, "telescoping check limited to n <= 12");
  double rhs = 0.0;
  std::vector<std::size_t> idx;
  for (std::uint64_t b = 1; b < (1ull << n); ++b) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i)
      if ((b >> i) & 1u) idx.push_back(i);
    const double term = delta_iterated(f, yp, y, idx);
    rhs += (idx.size() % 2 == 0) ? term : -term;
  }
  return std::abs(f.evaluate(y) - f.evaluate(yp) - rhs);
}

double delete_one(const Functional& f, const Configuration& y, std::size_t i) {
  require(f.variable_length(), ErrorCode::FixedArityFunctional, f.name() + " has a fixed arity");
  require(i < y.size(), ErrorCode::IndexOutOfRange, "deletion index out of range");
  return f.delete_difference(y, i);
}

double delete_two(const Functional& f, const Configuration& y, std::size_t i, std::size_t j) {
  require(f.variable_length(), ErrorCode::FixedArityFunctional, f.name() + " has a fixed arity");
  require(i < y.size() && j < y.size(), ErrorCode::IndexOutOfRange, "deletion index out of range");
  require(i != j, ErrorCode::InvalidArgument, "D_{i,j} needs i != j");
  // D_i f(y) - D_i f(y without j); index i shifts down when j precedes it.
  return f.delete_difference(y, i) - f.delete_difference(y.without(j), i > j ? i - 1 : i);
}

Configuration recombine(const Configuration& x, const Configuration& xp, const Configuration& xt,
                        const RecombinationSelector& sel) {
  require(x.size() == xp.size() && x.size() == xt.size() && sel.choices.size() == x.size(),
          ErrorCode::LengthMismatch, "recombination needs equal lengths");
  Configuration out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (sel.choices[i]) {
      case Source::Base: break;
      case Source::Prime: out.set(i, xp[i]); break;
      case Source::Tilde: out.set(i, xt[i]); break;
    }
  }
  return out;
}

}  // namespace bebp
