// Compiled with -mavx2 -mfma -ffp-contract=off; only reached after a runtime
// CPU check.

#include <immintrin.h>

#include <cmath>

#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan::simd::detail {
namespace {

// Cephes-style exp: x = n ln2 + r, |r| <= ln2 / 2, exp(r) from a (3,3) Pade
// form. Within ~1 ulp of std::exp over the clamped range.
inline __m256d exp_pd(__m256d x) noexcept {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.39);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), xx,
                              _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), xx,
                              _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^n via the exponent field.
  __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(fx));
  n = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n));
  return _mm256_andnot_pd(underflow, r);
}

// Per-lane error-free accumulation: sum holds the rounded totals, err the
// rounding error of every addition.
struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d err = _mm256_setzero_pd();

  void add(__m256d v) noexcept {
    const __m256d s = _mm256_add_pd(sum, v);
    const __m256d bb = _mm256_sub_pd(s, sum);
    const __m256d e = _mm256_add_pd(_mm256_sub_pd(sum, _mm256_sub_pd(s, bb)), _mm256_sub_pd(v, bb));
    sum = s;
    err = _mm256_add_pd(err, e);
  }

  void drain_into(DoubleDouble& out) const noexcept {
    alignas(32) double s[4];
    alignas(32) double e[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(e, err);
    for (int l = 0; l < 4; ++l) out += DoubleDouble(s[l], e[l]);
  }
};

// Accumulators shared by every row of one block sum.
struct Accumulators {
  LaneSum v0;
  LaneSum v1;
  CompensatedSum tail;

  DoubleDouble result() const noexcept {
    DoubleDouble out = tail.result();
    v0.drain_into(out);
    v1.drain_into(out);
    return out;
  }
};

template <KernelFamily F>
inline __m256d distance4(const double* a_i, BlockView b, std::size_t j) noexcept {
  __m256d dist = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  for (std::size_t c = 0; c < b.dim; ++c) {
    const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(a_i[c]), _mm256_loadu_pd(b.coord(c) + j));
    if constexpr (F == KernelFamily::Gaussian) {
      // mul then add, not fma: distances round exactly as in the scalar path.
      dist = _mm256_add_pd(dist, _mm256_mul_pd(diff, diff));
    } else {
      dist = _mm256_add_pd(dist, _mm256_andnot_pd(sign, diff));
    }
  }
  return dist;
}

template <KernelFamily F>
inline double distance1(const double* a_i, BlockView b, std::size_t j) noexcept {
  double dist = 0.0;
  for (std::size_t c = 0; c < b.dim; ++c) {
    const double diff = a_i[c] - b.coord(c)[j];
    if constexpr (F == KernelFamily::Gaussian) {
      dist += diff * diff;
    } else {
      dist += std::abs(diff);
    }
  }
  return dist;
}

// Adds k(a_i, b_j) for j in [begin, b.count).
template <KernelFamily F>
inline void row_sum(const double* a_i, BlockView b, std::size_t begin, __m256d neg_rate,
                    double rate, Accumulators& acc) noexcept {
  std::size_t j = begin;
  for (; j + 8 <= b.count; j += 8) {
    acc.v0.add(exp_pd(_mm256_mul_pd(neg_rate, distance4<F>(a_i, b, j))));
    acc.v1.add(exp_pd(_mm256_mul_pd(neg_rate, distance4<F>(a_i, b, j + 4))));
  }
  for (; j + 4 <= b.count; j += 4) {
    acc.v0.add(exp_pd(_mm256_mul_pd(neg_rate, distance4<F>(a_i, b, j))));
  }
  for (; j < b.count; ++j) acc.tail.add(std::exp(-rate * distance1<F>(a_i, b, j)));
}

// Samples wider than this take the scalar path; the gather buffer is on the stack.
constexpr std::size_t kMaxVectorDim = 16;

template <KernelFamily F>
DoubleDouble cross_impl(BlockView a, BlockView b, double rate) noexcept {
  if (a.dim > kMaxVectorDim) return cross_sum_scalar(a, b, {F, rate});
  const __m256d neg_rate = _mm256_set1_pd(-rate);
  Accumulators acc;
  double point[kMaxVectorDim];
  for (std::size_t i = 0; i < a.count; ++i) {
    for (std::size_t c = 0; c < a.dim; ++c) point[c] = a.coord(c)[i];
    row_sum<F>(point, b, 0, neg_rate, rate, acc);
  }
  return acc.result();
}

template <KernelFamily F>
DoubleDouble within_impl(BlockView a, double rate) noexcept {
  if (a.dim > kMaxVectorDim) return within_sum_scalar(a, {F, rate});
  const __m256d neg_rate = _mm256_set1_pd(-rate);
  Accumulators acc;
  double point[kMaxVectorDim];
  for (std::size_t i = 0; i + 1 < a.count; ++i) {
    for (std::size_t c = 0; c < a.dim; ++c) point[c] = a.coord(c)[i];
    row_sum<F>(point, a, i + 1, neg_rate, rate, acc);
  }
  return acc.result() * 2.0;
}

}  // namespace

DoubleDouble cross_sum_avx2(BlockView a, BlockView b, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? cross_impl<KernelFamily::Gaussian>(a, b, kp.rate)
                                             : cross_impl<KernelFamily::Laplace>(a, b, kp.rate);
}

DoubleDouble within_sum_avx2(BlockView a, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? within_impl<KernelFamily::Gaussian>(a, kp.rate)
                                             : within_impl<KernelFamily::Laplace>(a, kp.rate);
}

}  // namespace mmdscan::simd::detail
