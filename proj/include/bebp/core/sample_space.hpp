#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bebp/core/configuration.hpp"
#include "bebp/core/rng.hpp"

namespace bebp {

struct FiniteAlphabet {
  std::vector<std::string> symbols;
  // Numeric value of each symbol as seen by functionals; defaults to the
  // symbol index when the labels are not numbers.
  std::vector<double> values;
};

struct UnitCube {
  int dim = 1;
};

class SampleSpace {
 public:
  static SampleSpace alphabet(std::vector<std::string> symbols);
  // Alphabet whose labels are the given numbers; elements store the value.
  static SampleSpace numeric_alphabet(std::vector<double> values);
  static SampleSpace cube(int dim);

  bool is_alphabet() const { return std::holds_alternative<FiniteAlphabet>(kind_); }
  bool is_cube() const { return std::holds_alternative<UnitCube>(kind_); }
  const FiniteAlphabet& alphabet() const { return std::get<FiniteAlphabet>(kind_); }
  int dim() const;
  std::size_t alphabet_size() const { return alphabet().symbols.size(); }
  std::size_t element_width() const { return is_alphabet() ? 1 : static_cast<std::size_t>(dim()); }

 private:
  explicit SampleSpace(std::variant<FiniteAlphabet, UnitCube> kind) : kind_(std::move(kind)) {}
  std::variant<FiniteAlphabet, UnitCube> kind_;
};

// Anything that can draw i.i.d. elements of a fixed width.
class PointLaw {
 public:
  virtual ~PointLaw() = default;
  virtual std::size_t width() const = 0;
  virtual void draw(RandomStream& stream, std::span<double> out) const = 0;

  Configuration sample(std::size_t n, RandomStream& stream) const;
};

// Product measure factor: a weighted alphabet or uniform Lebesgue on the cube.
class Distribution final : public PointLaw {
 public:
  static Distribution uniform(SampleSpace space);
  static Distribution weighted(SampleSpace space, std::vector<double> weights);

  const SampleSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  // Stored value for alphabet symbol k.
  double symbol_value(std::size_t k) const { return space_.alphabet().values[k]; }

  std::size_t width() const override { return space_.element_width(); }
  void draw(RandomStream& stream, std::span<double> out) const override;

 private:
  Distribution(SampleSpace space, std::vector<double> weights);

  SampleSpace space_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

Configuration sample_iid(const PointLaw& law, std::size_t n, RandomStream& stream);

}  // namespace bebp
