#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bebp/core/configuration.hpp"
#include "bebp/core/rng.hpp"
#include "bebp/core/sample_space.hpp"

namespace bebp {

// A real-valued map on configurations. Fixed-arity functionals accept only
// one length; variable-length ones accept any length and therefore support
// the deletion operators.
class Functional {
 public:
  virtual ~Functional() = default;

  virtual std::string name() const = 0;
  virtual double evaluate(const Configuration& y) const = 0;
  virtual std::optional<std::size_t> arity() const { return std::nullopt; }
  virtual bool symmetric() const { return false; }

  bool variable_length() const { return !arity().has_value(); }
  double operator()(const Configuration& y) const { return evaluate(y); }

  // f(y) - f(y with element j replaced by value). Functionals whose values
  // live on a lattice override this so that equal lattice differences give
  // bit-identical doubles (exact zero tests on iterated differences).
  virtual double replace_difference(const Configuration& y, std::size_t j,
                                    std::span<const double> value) const;
  // f(y) - f(y with element i deleted).
  virtual double delete_difference(const Configuration& y, std::size_t i) const;
};

using FunctionalPtr = std::shared_ptr<const Functional>;

// Throws ArityMismatch when y does not match a fixed arity.
void check_arity(const Functional& f, const Configuration& y);

namespace functionals {

// scale * sum of the first coordinate of every element.
class Sum final : public Functional {
 public:
  explicit Sum(double scale = 1.0) : scale_(scale) {}
  std::string name() const override { return "sum"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }
  double replace_difference(const Configuration& y, std::size_t j, std::span<const double> value) const override;
  double delete_difference(const Configuration& y, std::size_t i) const override;

 private:
  double scale_;
};

class Constant final : public Functional {
 public:
  explicit Constant(double value) : value_(value) {}
  std::string name() const override { return "constant"; }
  double evaluate(const Configuration&) const override { return value_; }
  bool symmetric() const override { return true; }

 private:
  double value_;
};

// Number of points.
class Count final : public Functional {
 public:
  std::string name() const override { return "count"; }
  double evaluate(const Configuration& y) const override { return static_cast<double>(y.size()); }
  bool symmetric() const override { return true; }
};

// Maximum of the first coordinate.
class Max final : public Functional {
 public:
  std::string name() const override { return "max"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }
};

// y_1 * y_2 (first coordinates) for configurations of length 2.
class Product final : public Functional {
 public:
  std::string name() const override { return "product"; }
  double evaluate(const Configuration& y) const override;
  std::optional<std::size_t> arity() const override { return 2; }
  bool symmetric() const override { return true; }
};

// scale * sum over i<j of y_i * y_j.
class PairwiseProducts final : public Functional {
 public:
  explicit PairwiseProducts(double scale = 1.0) : scale_(scale) {}
  std::string name() const override { return "pairwise-products"; }
  double evaluate(const Configuration& y) const override;
  bool symmetric() const override { return true; }

 private:
  double scale_;
};

// Arbitrary function on E^n given by its table; coordinate 0 is the most
// significant digit of the table index.
class Table final : public Functional {
 public:
  Table(const Distribution& dist, std::size_t n, std::vector<double> values);
  // Table with i.i.d. standard normal entries.
  static Table random(const Distribution& dist, std::size_t n, RandomStream& stream);

  std::string name() const override { return "table"; }
  double evaluate(const Configuration& y) const override;
  std::optional<std::size_t> arity() const override { return n_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> symbol_values_;
  std::size_t n_;
  std::vector<double> values_;
};

}  // namespace functionals

}  // namespace bebp

#include <functional>

namespace bebp {

// Builds the functional for one replication. Geometric functionals draw their
// integration grid from the stream; plain functionals ignore it.
using FunctionalFactory = std::function<FunctionalPtr(RandomStream& integration)>;

FunctionalFactory fixed_functional(FunctionalPtr f);

}  // namespace bebp
