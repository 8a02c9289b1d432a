// AArch64 Advanced SIMD variant. NEON is mandatory on AArch64, so this backend
// is always available when compiled in.

#include <arm_neon.h>

#include <cmath>

#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan::simd::detail {
namespace {

// Same range reduction and Pade form as the AVX2 variant.
inline float64x2_t exp_pd(float64x2_t x) noexcept {
  const uint64x2_t underflow = vcltq_f64(x, vdupq_n_f64(-708.39));
  x = vmaxq_f64(vminq_f64(x, vdupq_n_f64(709.0)), vdupq_n_f64(-708.39));

  const float64x2_t fx = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634073599)));
  x = vfmsq_f64(x, fx, vdupq_n_f64(6.93145751953125E-1));
  x = vfmsq_f64(x, fx, vdupq_n_f64(1.42860682030941723212E-6));

  const float64x2_t xx = vmulq_f64(x, x);
  float64x2_t p = vfmaq_f64(vdupq_n_f64(3.02994407707441961300E-2), xx,
                            vdupq_n_f64(1.26177193074810590878E-4));
  p = vfmaq_f64(vdupq_n_f64(9.99999999999999999910E-1), p, xx);
  p = vmulq_f64(p, x);
  float64x2_t q = vfmaq_f64(vdupq_n_f64(2.52448340349684104192E-3), xx,
                            vdupq_n_f64(3.00198505138664455042E-6));
  q = vfmaq_f64(vdupq_n_f64(2.27265548208155028766E-1), q, xx);
  q = vfmaq_f64(vdupq_n_f64(2.00000000000000000009E0), q, xx);

  float64x2_t r = vdivq_f64(p, vsubq_f64(q, p));
  r = vfmaq_f64(vdupq_n_f64(1.0), vdupq_n_f64(2.0), r);

  int64x2_t n = vcvtq_s64_f64(fx);
  n = vshlq_n_s64(vaddq_s64(n, vdupq_n_s64(1023)), 52);
  r = vmulq_f64(r, vreinterpretq_f64_s64(n));
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(r), underflow));
}

// Per-lane error-free accumulation, as in the AVX2 variant.
struct LaneSum {
  float64x2_t sum = vdupq_n_f64(0.0);
  float64x2_t err = vdupq_n_f64(0.0);

  void add(float64x2_t v) noexcept {
    const float64x2_t s = vaddq_f64(sum, v);
    const float64x2_t bb = vsubq_f64(s, sum);
    const float64x2_t e = vaddq_f64(vsubq_f64(sum, vsubq_f64(s, bb)), vsubq_f64(v, bb));
    sum = s;
    err = vaddq_f64(err, e);
  }

  void drain_into(DoubleDouble& out) const noexcept {
    out += DoubleDouble(vgetq_lane_f64(sum, 0), vgetq_lane_f64(err, 0));
    out += DoubleDouble(vgetq_lane_f64(sum, 1), vgetq_lane_f64(err, 1));
  }
};

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
inline float64x2_t distance2(const double* a_i, BlockView b, std::size_t j) noexcept {
  float64x2_t dist = vdupq_n_f64(0.0);
  for (std::size_t c = 0; c < b.dim; ++c) {
    const float64x2_t diff = vsubq_f64(vdupq_n_f64(a_i[c]), vld1q_f64(b.coord(c) + j));
    if constexpr (F == KernelFamily::Gaussian) {
      dist = vaddq_f64(dist, vmulq_f64(diff, diff));
    } else {
      dist = vaddq_f64(dist, vabsq_f64(diff));
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

template <KernelFamily F>
inline void row_sum(const double* a_i, BlockView b, std::size_t begin, double rate,
                    Accumulators& acc) noexcept {
  const float64x2_t neg_rate = vdupq_n_f64(-rate);
  std::size_t j = begin;
  for (; j + 4 <= b.count; j += 4) {
    acc.v0.add(exp_pd(vmulq_f64(neg_rate, distance2<F>(a_i, b, j))));
    acc.v1.add(exp_pd(vmulq_f64(neg_rate, distance2<F>(a_i, b, j + 2))));
  }
  for (; j + 2 <= b.count; j += 2) {
    acc.v0.add(exp_pd(vmulq_f64(neg_rate, distance2<F>(a_i, b, j))));
  }
  for (; j < b.count; ++j) acc.tail.add(std::exp(-rate * distance1<F>(a_i, b, j)));
}

constexpr std::size_t kMaxVectorDim = 16;

template <KernelFamily F>
DoubleDouble cross_impl(BlockView a, BlockView b, double rate) noexcept {
  if (a.dim > kMaxVectorDim) return cross_sum_scalar(a, b, {F, rate});
  Accumulators acc;
  double point[kMaxVectorDim];
  for (std::size_t i = 0; i < a.count; ++i) {
    for (std::size_t c = 0; c < a.dim; ++c) point[c] = a.coord(c)[i];
    row_sum<F>(point, b, 0, rate, acc);
  }
  return acc.result();
}

template <KernelFamily F>
DoubleDouble within_impl(BlockView a, double rate) noexcept {
  if (a.dim > kMaxVectorDim) return within_sum_scalar(a, {F, rate});
  Accumulators acc;
  double point[kMaxVectorDim];
  for (std::size_t i = 0; i + 1 < a.count; ++i) {
    for (std::size_t c = 0; c < a.dim; ++c) point[c] = a.coord(c)[i];
    row_sum<F>(point, a, i + 1, rate, acc);
  }
  return acc.result() * 2.0;
}

}  // namespace

DoubleDouble cross_sum_neon(BlockView a, BlockView b, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? cross_impl<KernelFamily::Gaussian>(a, b, kp.rate)
                                             : cross_impl<KernelFamily::Laplace>(a, b, kp.rate);
}

DoubleDouble within_sum_neon(BlockView a, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? within_impl<KernelFamily::Gaussian>(a, kp.rate)
                                             : within_impl<KernelFamily::Laplace>(a, kp.rate);
}

}  // namespace mmdscan::simd::detail
