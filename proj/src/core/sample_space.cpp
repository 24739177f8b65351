#include "bebp/core/sample_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bebp/core/error.hpp"

namespace bebp {

SampleSpace SampleSpace::alphabet(std::vector<std::string> symbols) {
  require(!symbols.empty(), ErrorCode::InvalidArgument, "alphabet needs at least one symbol");
  require(std::set<std::string>(symbols.begin(), symbols.end()).size() == symbols.size(),
          ErrorCode::InvalidArgument, "alphabet symbols must be distinct");
  std::vector<double> values(symbols.size());
  std::iota(values.begin(), values.end(), 0.0);
  return SampleSpace(FiniteAlphabet{std::move(symbols), std::move(values)});
}

SampleSpace SampleSpace::numeric_alphabet(std::vector<double> values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "alphabet needs at least one symbol");
  require(std::set<double>(values.begin(), values.end()).size() == values.size(),
          ErrorCode::InvalidArgument, "alphabet symbols must be distinct");
  std::vector<std::string> labels;
  labels.reserve(values.size());
  for (double v : values) {
    auto text = std::to_string(v);
    text.erase(text.find_last_not_of('0') + 1);
    if (!text.empty() && text.back() == '.') text.pop_back();
    labels.push_back(text);
  }
  return SampleSpace(FiniteAlphabet{std::move(labels), std::move(values)});
}

SampleSpace SampleSpace::cube(int dim) {
  require(dim >= 1, ErrorCode::InvalidArgument, "cube dimension must be >= 1");
  return SampleSpace(UnitCube{dim});
}

int SampleSpace::dim() const {
  require(is_cube(), ErrorCode::InvalidArgument, "dimension requested for an alphabet");
  return std::get<UnitCube>(kind_).dim;
}

Configuration PointLaw::sample(std::size_t n, RandomStream& stream) const {
  Configuration out(width(), n);
  for (std::size_t i = 0; i < n; ++i) draw(stream, out.element(i));
  return out;
}

Distribution Distribution::uniform(SampleSpace space) {
  std::vector<double> weights;
  if (space.is_alphabet()) weights.assign(space.alphabet_size(), 1.0 / static_cast<double>(space.alphabet_size()));
  return Distribution(std::move(space), std::move(weights));
}

Distribution Distribution::weighted(SampleSpace space, std::vector<double> weights) {
  require(space.is_alphabet(), ErrorCode::InvalidArgument, "weights only apply to finite alphabets");
  return Distribution(std::move(space), std::move(weights));
}

Distribution::Distribution(SampleSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_.is_alphabet()) return;
  require(weights_.size() == space_.alphabet_size(), ErrorCode::LengthMismatch,
          "one weight per symbol required");
  double total = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidArgument, "weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "weights must sum to 1");
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
}

void Distribution::draw(RandomStream& stream, std::span<double> out) const {
  if (space_.is_alphabet()) {
    const double u = stream.uniform() * cumulative_.back();
    // u < back(), so upper_bound always lands on a symbol with positive weight.
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    out[0] = symbol_value(static_cast<std::size_t>(it - cumulative_.begin()));
    return;
  }
  for (auto& x : out) x = stream.uniform();
}

Configuration sample_iid(const PointLaw& law, std::size_t n, RandomStream& stream) {
  require(n >= 1, ErrorCode::InvalidArgument, "sample size must be >= 1");
  return law.sample(n, stream);
}

}  // namespace bebp
