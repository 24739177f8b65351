#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "bebp/core/configuration.hpp"
#include "bebp/core/sample_space.hpp"

namespace bebp {

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// |E|^n; throws CapExceeded once it passes cap.
std::uint64_t configuration_count(const Distribution& dist, std::size_t n, std::uint64_t cap = kEnumerationCap);

// Visits every y in E^n with its probability, in table order (coordinate 0
// most significant). Requires a finite alphabet.
void for_each_configuration(const Distribution& dist, std::size_t n,
                            const std::function<void(const Configuration&, double)>& visit,
                            std::uint64_t cap = kEnumerationCap);

}  // namespace bebp
