#include "bebp/core/enumerate.hpp"

#include <vector>

#include "bebp/core/error.hpp"

namespace bebp {

std::uint64_t configuration_count(const Distribution& dist, std::size_t n, std::uint64_t cap) {
  require(dist.space().is_alphabet(), ErrorCode::InvalidArgument, "enumeration needs a finite alphabet");
  const std::uint64_t k = dist.space().alphabet_size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / k) fail(ErrorCode::CapExceeded, "|E|^n exceeds the enumeration cap");
    total *= k;
  }
  require(total <= cap, ErrorCode::CapExceeded, "|E|^n exceeds the enumeration cap");
  return total;
}

void for_each_configuration(const Distribution& dist, std::size_t n,
                            const std::function<void(const Configuration&, double)>& visit, std::uint64_t cap) {
  const std::uint64_t total = configuration_count(dist, n, cap);
  const std::size_t k = dist.space().alphabet_size();
  const auto& w = dist.weights();
  std::vector<std::size_t> digits(n, 0);
  Configuration y(1, n);
  for (std::size_t i = 0; i < n; ++i) y.element(i)[0] = dist.symbol_value(0);
  for (std::uint64_t step = 0; step < total; ++step) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= w[digits[i]];
    visit(y, p);
    // odometer increment, last coordinate fastest
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < k) {
        y.element(i)[0] = dist.symbol_value(digits[i]);
        break;
      }
      digits[i] = 0;
      y.element(i)[0] = dist.symbol_value(0);
    }
  }
}

}  // namespace bebp
