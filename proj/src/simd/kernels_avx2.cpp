// Compiled with -mavx2 only (no FMA), so every lane performs the same
// subtract, multiply, add sequence as the scalar kernels.
#include <immintrin.h>

#include "bebp/simd/kernels.hpp"

namespace bebp::simd {

namespace {

inline __m256d squared_distance(const PointBlock& pts, std::size_t p, const double* c) {
  __m256d d2 = _mm256_setzero_pd();
  for (std::size_t k = 0; k < pts.dim; ++k) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(pts.coords[k] + p), _mm256_set1_pd(c[k]));
    d2 = _mm256_add_pd(d2, _mm256_mul_pd(diff, diff));
  }
  return d2;
}

// (d, id) < (ref_d, ref_id) lexicographically.
inline __m256d lex_less(__m256d d, __m256d id, __m256d ref_d, __m256d ref_id) {
  const __m256d lt = _mm256_cmp_pd(d, ref_d, _CMP_LT_OQ);
  const __m256d eq = _mm256_cmp_pd(d, ref_d, _CMP_EQ_OQ);
  return _mm256_or_pd(lt, _mm256_and_pd(eq, _mm256_cmp_pd(id, ref_id, _CMP_LT_OQ)));
}

void nearest1_avx2(const PointBlock& pts, const Candidates& cand, double* bd, double* bi) {
  std::size_t p = 0;
  for (; p + 4 <= pts.count; p += 4) {
    __m256d b = _mm256_loadu_pd(bd + p), ib = _mm256_loadu_pd(bi + p);
    for (std::size_t c = 0; c < cand.count; ++c) {
      const __m256d d2 = squared_distance(pts, p, cand.coords + c * pts.dim);
      const __m256d id = _mm256_set1_pd(cand.ids[c]);
      const __m256d better = lex_less(d2, id, b, ib);
      b = _mm256_blendv_pd(b, d2, better);
      ib = _mm256_blendv_pd(ib, id, better);
    }
    _mm256_storeu_pd(bd + p, b);
    _mm256_storeu_pd(bi + p, ib);
  }
  if (p < pts.count) {
    const std::size_t rest = pts.count - p;
    const double* shifted[8];
    for (std::size_t k = 0; k < pts.dim; ++k) shifted[k] = pts.coords[k] + p;
    scalar_kernels().nearest1({shifted, rest, pts.dim}, cand, bd + p, bi + p);
  }
}

void nearest2_avx2(const PointBlock& pts, const Candidates& cand, double* bd, double* bi, double* sd, double* si) {
  std::size_t p = 0;
  for (; p + 4 <= pts.count; p += 4) {
    __m256d b = _mm256_loadu_pd(bd + p), ib = _mm256_loadu_pd(bi + p);
    __m256d s = _mm256_loadu_pd(sd + p), is = _mm256_loadu_pd(si + p);
    for (std::size_t c = 0; c < cand.count; ++c) {
      const __m256d d2 = squared_distance(pts, p, cand.coords + c * pts.dim);
      const __m256d id = _mm256_set1_pd(cand.ids[c]);
      const __m256d better1 = lex_less(d2, id, b, ib);
      const __m256d better2 = lex_less(d2, id, s, is);
      // second <- old best if better1, else candidate if better2
      s = _mm256_blendv_pd(_mm256_blendv_pd(s, d2, better2), b, better1);
      is = _mm256_blendv_pd(_mm256_blendv_pd(is, id, better2), ib, better1);
      b = _mm256_blendv_pd(b, d2, better1);
      ib = _mm256_blendv_pd(ib, id, better1);
    }
    _mm256_storeu_pd(bd + p, b);
    _mm256_storeu_pd(bi + p, ib);
    _mm256_storeu_pd(sd + p, s);
    _mm256_storeu_pd(si + p, is);
  }
  if (p < pts.count) {
    const std::size_t rest = pts.count - p;
    const double* shifted[8];
    for (std::size_t k = 0; k < pts.dim; ++k) shifted[k] = pts.coords[k] + p;
    scalar_kernels().nearest2({shifted, rest, pts.dim}, cand, bd + p, bi + p, sd + p, si + p);
  }
}

void cover_avx2(const PointBlock& pts, const double* centers, const double* radius2, std::size_t count,
                std::uint8_t* covered) {
  std::size_t p = 0;
  for (; p + 4 <= pts.count; p += 4) {
    __m256d hit = _mm256_castsi256_pd(_mm256_set_epi64x(covered[p + 3] ? -1 : 0, covered[p + 2] ? -1 : 0,
                                                        covered[p + 1] ? -1 : 0, covered[p] ? -1 : 0));
    for (std::size_t c = 0; c < count && _mm256_movemask_pd(hit) != 0xF; ++c) {
      const __m256d d2 = squared_distance(pts, p, centers + c * pts.dim);
      hit = _mm256_or_pd(hit, _mm256_cmp_pd(d2, _mm256_set1_pd(radius2[c]), _CMP_LE_OQ));
    }
    const int mask = _mm256_movemask_pd(hit);
    for (int l = 0; l < 4; ++l) covered[p + l] = static_cast<std::uint8_t>((mask >> l) & 1);
  }
  if (p < pts.count) {
    const double* shifted[8];
    for (std::size_t k = 0; k < pts.dim; ++k) shifted[k] = pts.coords[k] + p;
    scalar_kernels().cover({shifted, pts.count - p, pts.dim}, centers, radius2, count, covered + p);
  }
}

const KernelTable kAvx2{"avx2", nearest1_avx2, nearest2_avx2, cover_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace bebp::simd
