#pragma once

// Pairwise kernel sums over blocks of samples.
//
// These loops dominate the cost of every MMD statistic in the library. Each
// instruction set gets its own translation unit; the scalar one is the
// reference the others are equivalence-tested against. The backend is chosen
// once at runtime from CPU features and may be overridden with the
// MMDSCAN_SIMD environment variable (scalar | avx2 | neon) or set_backend().

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mmdscan/double_double.hpp"
#include "mmdscan/kernel.hpp"

namespace mmdscan::simd {

/// A block of `count` samples in dimension-major layout: coordinate c of
/// sample j lives at data[c * count + j].
struct BlockView {
  const double* data = nullptr;
  std::size_t count = 0;
  std::size_t dim = 1;

  const double* coord(std::size_t c) const noexcept { return data + c * count; }
};

/// exp(-rate * dist), dist = squared L2 (Gaussian) or L1 (Laplace).
struct KernelParams {
  KernelFamily family = KernelFamily::Gaussian;
  double rate = 0.5;

  static KernelParams from(const KernelSpec& spec) noexcept {
    return {spec.family(), spec.rate()};
  }
};

using CrossSumFn = DoubleDouble (*)(BlockView a, BlockView b, KernelParams kp) noexcept;
using WithinSumFn = DoubleDouble (*)(BlockView a, KernelParams kp) noexcept;

struct Backend {
  std::string_view name;
  /// sum_{i,j} k(a_i, b_j), accumulated without rounding loss (every
  /// addition's error is carried). The visiting order is fixed for a given
  /// backend, so results are reproducible.
  CrossSumFn cross_sum;
  /// sum_{i != j} k(a_i, a_j), computed as twice the strict upper triangle.
  WithinSumFn within_sum;
};

/// Every backend compiled in and supported by the running CPU; scalar first.
std::span<const Backend> available_backends();

const Backend& active_backend();

/// Selects a backend by name. Returns false (and changes nothing) when the
/// backend is unknown or unsupported on this CPU. Not thread-safe with
/// respect to concurrent kernel evaluation.
bool set_backend(std::string_view name);

inline DoubleDouble cross_sum(BlockView a, BlockView b, KernelParams kp) noexcept {
  return active_backend().cross_sum(a, b, kp);
}

inline DoubleDouble within_sum(BlockView a, KernelParams kp) noexcept {
  return active_backend().within_sum(a, kp);
}

namespace detail {
DoubleDouble cross_sum_scalar(BlockView a, BlockView b, KernelParams kp) noexcept;
DoubleDouble within_sum_scalar(BlockView a, KernelParams kp) noexcept;
#if defined(MMDSCAN_HAVE_AVX2)
DoubleDouble cross_sum_avx2(BlockView a, BlockView b, KernelParams kp) noexcept;
DoubleDouble within_sum_avx2(BlockView a, KernelParams kp) noexcept;
#endif
#if defined(MMDSCAN_HAVE_NEON)
DoubleDouble cross_sum_neon(BlockView a, BlockView b, KernelParams kp) noexcept;
DoubleDouble within_sum_neon(BlockView a, KernelParams kp) noexcept;
#endif
}  // namespace detail

}  // namespace mmdscan::simd
