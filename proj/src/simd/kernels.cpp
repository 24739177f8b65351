#include "bebp/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace bebp::simd {

namespace {

inline double squared_distance(const PointBlock& pts, std::size_t p, const double* c) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < pts.dim; ++k) {
    const double diff = pts.coords[k][p] - c[k];
    d2 = d2 + diff * diff;
  }
  return d2;
}

void nearest1_scalar(const PointBlock& pts, const Candidates& cand, double* bd, double* bi) {
  for (std::size_t p = 0; p < pts.count; ++p) {
    double best = bd[p], id = bi[p];
    for (std::size_t c = 0; c < cand.count; ++c) {
      const double d2 = squared_distance(pts, p, cand.coords + c * pts.dim);
      if (d2 < best || (d2 == best && cand.ids[c] < id)) {
        best = d2;
        id = cand.ids[c];
      }
    }
    bd[p] = best;
    bi[p] = id;
  }
}

void nearest2_scalar(const PointBlock& pts, const Candidates& cand, double* bd, double* bi, double* sd, double* si) {
  for (std::size_t p = 0; p < pts.count; ++p) {
    double b = bd[p], ib = bi[p], s = sd[p], is = si[p];
    for (std::size_t c = 0; c < cand.count; ++c) {
      const double d2 = squared_distance(pts, p, cand.coords + c * pts.dim);
      const double id = cand.ids[c];
      if (d2 < b || (d2 == b && id < ib)) {
        s = b;
        is = ib;
        b = d2;
        ib = id;
      } else if (d2 < s || (d2 == s && id < is)) {
        s = d2;
        is = id;
      }
    }
    bd[p] = b;
    bi[p] = ib;
    sd[p] = s;
    si[p] = is;
  }
}

void cover_scalar(const PointBlock& pts, const double* centers, const double* radius2, std::size_t count,
                  std::uint8_t* covered) {
  for (std::size_t p = 0; p < pts.count; ++p) {
    if (covered[p]) continue;
    for (std::size_t c = 0; c < count; ++c)
      if (squared_distance(pts, p, centers + c * pts.dim) <= radius2[c]) {
        covered[p] = 1;
        break;
      }
  }
}

const KernelTable kScalar{"scalar", nearest1_scalar, nearest2_scalar, cover_scalar};

std::atomic<bool> g_force_scalar{std::getenv("BEBP_FORCE_SCALAR") != nullptr};

}  // namespace

#ifdef BEBP_HAVE_AVX2
const KernelTable& avx2_table();
#endif

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#ifdef BEBP_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  if (g_force_scalar.load()) return kScalar;
  const KernelTable* fast = avx2_kernels();
  return fast ? *fast : kScalar;
}

void force_scalar(bool on) { g_force_scalar = on; }

}  // namespace bebp::simd
