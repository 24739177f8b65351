#pragma once

#include <cstddef>
#include <cstdint>

namespace bebp::simd {

// Points are structure-of-arrays (coords[k][p]); candidates are packed
// array-of-structures (dim doubles each) with their ids stored as doubles so
// that comparisons stay in one register type. Ordering is lexicographic on
// (squared distance, id), which makes results independent of candidate order.
struct PointBlock {
  const double* const* coords;
  std::size_t count;
  std::size_t dim;
};

struct Candidates {
  const double* coords;
  const double* ids;
  std::size_t count;
};

// Updates the running nearest (bd, bi).
using Nearest1Fn = void (*)(const PointBlock&, const Candidates&, double* bd, double* bi);
// Updates the running nearest and second-nearest.
using Nearest2Fn = void (*)(const PointBlock&, const Candidates&, double* bd, double* bi, double* sd, double* si);
// Sets covered[p] = 1 when some ball (center, squared radius) contains point p.
using CoverFn = void (*)(const PointBlock&, const double* centers, const double* radius2, std::size_t count,
                         std::uint8_t* covered);

struct KernelTable {
  const char* name;
  Nearest1Fn nearest1;
  Nearest2Fn nearest2;
  CoverFn cover;
};

const KernelTable& scalar_kernels();
// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// The table in use: AVX2 when available unless forced to scalar (also via the
// BEBP_FORCE_SCALAR environment variable).
const KernelTable& kernels();
void force_scalar(bool on);

}  // namespace bebp::simd
