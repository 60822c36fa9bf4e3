// AVX2 variants of the batch kernels. Four lanes of doubles; each kernel
// finishes the tail with the scalar reference so results stay identical.

#include "detail.hpp"

#if defined(GEOQM_HAVE_AVX2)

#include <immintrin.h>

#include <cstdint>

namespace geoqm::kernels::detail::avx2 {

namespace {

struct Quad {
  __m256d c0, c1, c2, c3;
};

// Rows r0..r3 (one spinor each) to columns (Re c1, Im c1, Re c2, Im c2).
inline Quad transpose(__m256d r0, __m256d r1, __m256d r2, __m256d r3) {
  const __m256d t0 = _mm256_unpacklo_pd(r0, r1);
  const __m256d t1 = _mm256_unpackhi_pd(r0, r1);
  const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
  const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
  return {_mm256_permute2f128_pd(t0, t2, 0x20), _mm256_permute2f128_pd(t1, t3, 0x20),
          _mm256_permute2f128_pd(t0, t2, 0x31), _mm256_permute2f128_pd(t1, t3, 0x31)};
}

inline Quad load_columns(const double* s) {
  return transpose(_mm256_loadu_pd(s), _mm256_loadu_pd(s + 4), _mm256_loadu_pd(s + 8),
                   _mm256_loadu_pd(s + 12));
}

inline __m256d sin_0_2pi(__m256d x) {
  const __m256d pi = _mm256_set1_pd(kPi);
  const __m256d neg_pi = _mm256_set1_pd(-kPi);
  const __m256d half_pi = _mm256_set1_pd(kHalfPi);
  const __m256d neg_half_pi = _mm256_set1_pd(-kHalfPi);

  __m256d y = _mm256_sub_pd(pi, x);
  const __m256d above = _mm256_cmp_pd(y, half_pi, _CMP_GT_OQ);
  const __m256d below = _mm256_cmp_pd(y, neg_half_pi, _CMP_LT_OQ);
  const __m256d folded_hi = _mm256_sub_pd(pi, y);
  const __m256d folded_lo = _mm256_sub_pd(neg_pi, y);
  y = _mm256_blendv_pd(y, folded_hi, above);
  y = _mm256_blendv_pd(y, folded_lo, below);

  const __m256d y2 = _mm256_mul_pd(y, y);
  __m256d p = _mm256_set1_pd(kSinCoeffs[0]);
  for (int k = 1; k < 12; ++k) p = _mm256_add_pd(_mm256_mul_pd(p, y2), _mm256_set1_pd(kSinCoeffs[k]));
  return _mm256_mul_pd(p, y);
}

}  // namespace

void hopf_project(const double* s, double* xyz, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4, s += 16, xyz += 12) {
    const Quad q = load_columns(s);
    const __m256d x = _mm256_mul_pd(two, _mm256_add_pd(_mm256_mul_pd(q.c0, q.c2), _mm256_mul_pd(q.c1, q.c3)));
    const __m256d y = _mm256_mul_pd(two, _mm256_sub_pd(_mm256_mul_pd(q.c0, q.c3), _mm256_mul_pd(q.c1, q.c2)));
    const __m256d z = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(q.c2, q.c2), _mm256_mul_pd(q.c3, q.c3)),
                                    _mm256_add_pd(_mm256_mul_pd(q.c0, q.c0), _mm256_mul_pd(q.c1, q.c1)));
    alignas(32) double bx[4], by[4], bz[4];
    _mm256_store_pd(bx, x);
    _mm256_store_pd(by, y);
    _mm256_store_pd(bz, z);
    for (int l = 0; l < 4; ++l) {
      xyz[3 * l + 0] = bx[l];
      xyz[3 * l + 1] = by[l];
      xyz[3 * l + 2] = bz[l];
    }
  }
  scalar::hopf_project(s, xyz, n - k);
}

void transition_probability(const double* p, const double* q, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4, p += 16, q += 16) {
    const Quad a = load_columns(p);
    const Quad b = load_columns(q);
    const __m256d re = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(b.c0, a.c0), _mm256_mul_pd(b.c1, a.c1)),
                                     _mm256_add_pd(_mm256_mul_pd(b.c2, a.c2), _mm256_mul_pd(b.c3, a.c3)));
    const __m256d im = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(b.c0, a.c1), _mm256_mul_pd(b.c1, a.c0)),
                                     _mm256_sub_pd(_mm256_mul_pd(b.c2, a.c3), _mm256_mul_pd(b.c3, a.c2)));
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_mul_pd(re, re), _mm256_mul_pd(im, im)));
  }
  scalar::transition_probability(p, q, out + k, n - k);
}

void apply_su2(Su2Coeffs u, const double* in, double* out, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(u.a.real());
  const __m256d ai = _mm256_set1_pd(u.a.imag());
  const __m256d br = _mm256_set1_pd(u.b.real());
  const __m256d bi = _mm256_set1_pd(u.b.imag());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4, in += 16, out += 16) {
    const Quad q = load_columns(in);
    const __m256d r1 = q.c0, i1 = q.c1, r2 = q.c2, i2 = q.c3;
    const __m256d o0 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(ar, r1), _mm256_mul_pd(ai, i1)),
                                     _mm256_sub_pd(_mm256_mul_pd(br, r2), _mm256_mul_pd(bi, i2)));
    const __m256d o1 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ar, i1), _mm256_mul_pd(ai, r1)),
                                     _mm256_add_pd(_mm256_mul_pd(br, i2), _mm256_mul_pd(bi, r2)));
    const __m256d o2 = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(ar, r2), _mm256_mul_pd(ai, i2)),
                                     _mm256_add_pd(_mm256_mul_pd(br, r1), _mm256_mul_pd(bi, i1)));
    const __m256d o3 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(ar, i2), _mm256_mul_pd(ai, r2)),
                                     _mm256_sub_pd(_mm256_mul_pd(bi, r1), _mm256_mul_pd(br, i1)));
    const Quad rows = transpose(o0, o1, o2, o3);
    _mm256_storeu_pd(out, rows.c0);
    _mm256_storeu_pd(out + 4, rows.c1);
    _mm256_storeu_pd(out + 8, rows.c2);
    _mm256_storeu_pd(out + 12, rows.c3);
  }
  scalar::apply_su2(u, in, out, n - k);
}

void theta_inverse_cdf(const double* u, double* theta, std::size_t n) {
  const double* g = theta_table();
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d step_width = _mm256_set1_pd(kTableStep);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d pi = _mm256_set1_pd(kPi);
  // 2^52: OR-ing a small non-negative integer into its mantissa and
  // subtracting 2^52 converts int64 -> double exactly.
  const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d target = _mm256_mul_pd(_mm256_loadu_pd(u + k), two_pi);
    __m256i lo = _mm256_setzero_si256();
    for (std::int64_t step = kThetaTableIntervals / 2; step >= 1; step /= 2) {
      const __m256i probe = _mm256_add_epi64(lo, _mm256_set1_epi64x(step));
      const __m256d gp = _mm256_i64gather_pd(g, probe, 8);
      const __m256d take = _mm256_cmp_pd(gp, target, _CMP_LE_OQ);
      lo = _mm256_add_epi64(lo, _mm256_and_si256(_mm256_castpd_si256(take), _mm256_set1_epi64x(step)));
    }
    const __m256d lo_d = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(lo, magic_bits)), magic);
    __m256d a = _mm256_mul_pd(lo_d, step_width);
    __m256d b = _mm256_add_pd(a, step_width);
    for (int it = 0; it < kThetaBisectionSteps; ++it) {
      const __m256d m = _mm256_mul_pd(half, _mm256_add_pd(a, b));
      const __m256d gm = _mm256_sub_pd(m, sin_0_2pi(m));
      const __m256d below = _mm256_cmp_pd(gm, target, _CMP_LE_OQ);
      a = _mm256_blendv_pd(a, m, below);
      b = _mm256_blendv_pd(m, b, below);
    }
    _mm256_storeu_pd(theta + k, _mm256_sub_pd(_mm256_mul_pd(half, _mm256_add_pd(a, b)), pi));
  }
  scalar::theta_inverse_cdf(u + k, theta + k, n - k);
}

}  // namespace geoqm::kernels::detail::avx2

#endif  // GEOQM_HAVE_AVX2
