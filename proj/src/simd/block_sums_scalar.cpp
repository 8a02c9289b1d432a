#include <cmath>

#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan::simd::detail {
namespace {

template <KernelFamily F>
inline double pair_distance(BlockView a, std::size_t i, BlockView b, std::size_t j) noexcept {
  double dist = 0.0;
  for (std::size_t c = 0; c < a.dim; ++c) {
    const double diff = a.coord(c)[i] - b.coord(c)[j];
    if constexpr (F == KernelFamily::Gaussian) {
      dist += diff * diff;
    } else {
      dist += std::abs(diff);
    }
  }
  return dist;
}

template <KernelFamily F>
DoubleDouble cross_impl(BlockView a, BlockView b, double rate) noexcept {
  CompensatedSum total;
  for (std::size_t i = 0; i < a.count; ++i) {
    for (std::size_t j = 0; j < b.count; ++j) {
      total.add(std::exp(-rate * pair_distance<F>(a, i, b, j)));
    }
  }
  return total.result();
}

template <KernelFamily F>
DoubleDouble within_impl(BlockView a, double rate) noexcept {
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < a.count; ++i) {
    for (std::size_t j = i + 1; j < a.count; ++j) {
      total.add(std::exp(-rate * pair_distance<F>(a, i, a, j)));
    }
  }
  return total.result() * 2.0;
}

}  // namespace

DoubleDouble cross_sum_scalar(BlockView a, BlockView b, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? cross_impl<KernelFamily::Gaussian>(a, b, kp.rate)
                                             : cross_impl<KernelFamily::Laplace>(a, b, kp.rate);
}

DoubleDouble within_sum_scalar(BlockView a, KernelParams kp) noexcept {
  return kp.family == KernelFamily::Gaussian ? within_impl<KernelFamily::Gaussian>(a, kp.rate)
                                             : within_impl<KernelFamily::Laplace>(a, kp.rate);
}

}  // namespace mmdscan::simd::detail
