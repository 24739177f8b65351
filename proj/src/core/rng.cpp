#include "bebp/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace bebp {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::X: return "X";
    case Role::XPrime: return "X'";
    case Role::XTilde: return "X~";
    case Role::Integration: return "integration";
    case Role::SubsetSampler: return "subset-sampler";
    case Role::Inner: return "inner";
    case Role::Selector: return "selector";
    case Role::Normal: return "normal";
  }
  return "unknown";
}

void RandomStream::refill() {
  const Philox4x32::Block ctr{static_cast<std::uint32_t>(counter_),
                              static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
  ++counter_;
  const auto out = Philox4x32::generate(ctr, key_);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  available_ = 2;
}

RandomStream::result_type RandomStream::operator()() {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Lemire's nearly divisionless method with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_open_low();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream SeedPolicy::stream(std::uint64_t replication, Role role, std::uint64_t lane) const {
  std::uint64_t h = splitmix64(master_seed_);
  h = splitmix64(h ^ replication);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(role) << 48));
  h = splitmix64(h ^ lane);
  return RandomStream({static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)});
}

SeedPolicy SeedPolicy::child(std::uint64_t tag) const {
  return SeedPolicy(splitmix64(splitmix64(master_seed_ ^ 0xC0FFEEull) ^ tag));
}

}  // namespace bebp
