#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace bebp {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is a
// fixed key; successive draws walk the 128-bit counter, so two streams with
// different keys never share state.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key);
};

enum class Role : std::uint32_t {
  X = 1,
  XPrime = 2,
  XTilde = 3,
  Integration = 4,
  SubsetSampler = 5,
  Inner = 6,
  Selector = 7,
  Normal = 8,
};

std::string_view to_string(Role role);

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(Philox4x32::Key key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open_low() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  Philox4x32::Key key() const { return key_; }

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives independent streams from (master seed, replication, role, lane).
// The key is a hash of the tuple, so results do not depend on the order in
// which replications are scheduled.
class SeedPolicy {
 public:
  explicit SeedPolicy(std::uint64_t master_seed) : master_seed_(master_seed) {}

  std::uint64_t master_seed() const { return master_seed_; }

  RandomStream stream(std::uint64_t replication, Role role, std::uint64_t lane = 0) const;

  // A derived policy for a sub-experiment (e.g. one sample size in a sweep).
  SeedPolicy child(std::uint64_t tag) const;

 private:
  std::uint64_t master_seed_;
};

}  // namespace bebp
