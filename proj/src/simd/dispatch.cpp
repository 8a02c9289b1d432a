#include <atomic>
#include <cstdlib>
#include <string_view>
#include <vector>

#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan::simd {
namespace {

bool cpu_has_avx2() {
#if defined(MMDSCAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::vector<Backend> detect_backends() {
  std::vector<Backend> out;
  out.push_back({"scalar", &detail::cross_sum_scalar, &detail::within_sum_scalar});
#if defined(MMDSCAN_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back({"avx2", &detail::cross_sum_avx2, &detail::within_sum_avx2});
#endif
#if defined(MMDSCAN_HAVE_NEON)
  out.push_back({"neon", &detail::cross_sum_neon, &detail::within_sum_neon});
#endif
  return out;
}

const std::vector<Backend>& backends() {
  static const std::vector<Backend> all = detect_backends();
  return all;
}

const Backend* find(std::string_view name) {
  for (const auto& b : backends()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const Backend* initial_backend() {
  if (const char* env = std::getenv("MMDSCAN_SIMD")) {
    if (const Backend* b = find(env)) return b;
  }
  // Widest available backend is listed last.
  return &backends().back();
}

std::atomic<const Backend*>& current() {
  static std::atomic<const Backend*> ptr{initial_backend()};
  return ptr;
}

}  // namespace

std::span<const Backend> available_backends() { return backends(); }

const Backend& active_backend() { return *current().load(std::memory_order_relaxed); }

bool set_backend(std::string_view name) {
  const Backend* b = find(name);
  if (b == nullptr) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

}  // namespace mmdscan::simd
