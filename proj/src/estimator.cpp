#include "mmdscan/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmdscan/errors.hpp"
#include "mmdscan/parallel.hpp"

namespace mmdscan {
namespace {

// Total order used to make cross sums independent of argument order.
bool canonical_less(const Sequence& a, const Sequence& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto ca = a.coords();
  const auto cb = b.coords();
  return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

void check_index(std::size_t k, const Dataset& d, const GramBlocks& blocks) {
  if (k >= d.n()) {
    throw InvalidInput("sequence index " + std::to_string(k) + " out of range for n = " +
                       std::to_string(d.n()));
  }
  if (blocks.n != d.n() || blocks.m != d.m()) {
    throw InvalidInput("gram blocks were built for a different dataset");
  }
}

}  // namespace

double mmd2_from_sums(DoubleDouble within_x, std::size_t l1, DoubleDouble within_y,
                      std::size_t l2, DoubleDouble cross_xy) noexcept {
  const double a = static_cast<double>(l1);
  const double b = static_cast<double>(l2);
  // Both divisions go through exact integer products, so a single pair count
  // never exceeds 2^53 in practice.
  const DoubleDouble mean_x = within_x / a / (a - 1.0);
  const DoubleDouble mean_y = within_y / b / (b - 1.0);
  const DoubleDouble mean_xy = cross_xy * 2.0 / a / b;
  return (mean_x + mean_y - mean_xy).value();
}

double mmd2_unbiased(const Sequence& x, const Sequence& y, const KernelSpec& spec) {
  if (x.size() < 2 || y.size() < 2) throw InvalidInput("MMD estimator needs >= 2 samples per side");
  if (x.dim() != y.dim()) {
    throw InvalidInput("sequences differ in dimension (" + std::to_string(x.dim()) + " vs " +
                       std::to_string(y.dim()) + ")");
  }
  const auto kp = simd::KernelParams::from(spec);
  const DoubleDouble wx = simd::within_sum(x.view(), kp);
  const DoubleDouble wy = simd::within_sum(y.view(), kp);
  const DoubleDouble cxy = canonical_less(y, x) ? simd::cross_sum(y.view(), x.view(), kp)
                                          : simd::cross_sum(x.view(), y.view(), kp);
  return mmd2_from_sums(wx, x.size(), wy, y.size(), cxy);
}

GramBlocks build_gram_blocks(const Dataset& d, const KernelSpec& spec, std::size_t workers,
                             GramScope scope) {
  const std::size_t n = d.n();
  const bool pairwise = scope == GramScope::Full;
  if (!pairwise && !d.has_reference()) {
    throw InvalidState("reference-only gram blocks need a dataset with a reference sequence");
  }
  const auto kp = simd::KernelParams::from(spec);
  GramBlocks g;
  g.n = n;
  g.m = d.m();
  g.kernel = spec;
  g.scope = scope;
  g.within.assign(n, DoubleDouble{});
  if (pairwise) g.cross.assign(n * n, DoubleDouble{});

  // Task t < n: within block of sequence t. Task n: reference within block.
  // Remaining tasks enumerate the upper triangle, then reference crosses.
  const std::size_t pair_count = pairwise ? n * (n - 1) / 2 : 0;
  const bool ref = d.has_reference();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(pair_count);
  for (std::size_t k = 0; pairwise && k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) pairs.emplace_back(k, l);
  }
  std::vector<DoubleDouble> ref_cross(ref ? n : 0);
  DoubleDouble ref_within;

  const std::size_t tasks = n + pair_count + (ref ? n + 1 : 0);
  parallel_for(tasks, workers, [&](std::size_t t) {
    if (t < n) {
      g.within[t] = simd::within_sum(d.sequence(t).view(), kp);
      return;
    }
    t -= n;
    if (t < pair_count) {
      const auto [k, l] = pairs[t];
      const DoubleDouble s = simd::cross_sum(d.sequence(k).view(), d.sequence(l).view(), kp);
      g.cross[k * n + l] = s;
      g.cross[l * n + k] = s;
      return;
    }
    t -= pair_count;
    if (t < n) {
      ref_cross[t] = simd::cross_sum(d.reference().view(), d.sequence(t).view(), kp);
    } else {
      ref_within = simd::within_sum(d.reference().view(), kp);
    }
  });

  if (pairwise) g.row_cross.assign(n, DoubleDouble{});
  for (std::size_t k = 0; k < n; ++k) {
    g.within_total += g.within[k];
    if (!pairwise) continue;
    DoubleDouble row;
    for (std::size_t l = 0; l < n; ++l) row += g.cross[k * n + l];
    g.row_cross[k] = row;
    g.cross_total += row;
  }
  if (ref) {
    g.ref_within = ref_within;
    g.ref_cross = std::move(ref_cross);
  }
  return g;
}

double mmd2_ref(std::size_t k, const Dataset& d, const GramBlocks& blocks) {
  if (!d.has_reference() || !blocks.ref_within) {
    throw InvalidState("reference scoring requires a dataset with a reference sequence");
  }
  check_index(k, d, blocks);
  const std::size_t m = blocks.m;
  return mmd2_from_sums(*blocks.ref_within, m, blocks.within[k], m, blocks.ref_cross[k]);
}

double mmd2_loo(std::size_t k, const Dataset& d, const GramBlocks& blocks) {
  if (d.n() < 2) throw InvalidInput("leave-one-out scoring needs n >= 2");
  if (blocks.scope != GramScope::Full) {
    throw InvalidState("leave-one-out scoring needs gram blocks built with GramScope::Full");
  }
  check_index(k, d, blocks);
  const std::size_t m = blocks.m;
  const std::size_t stack = (blocks.n - 1) * m;
  // Within-stack sum: all within blocks except k, plus all ordered cross
  // pairs that avoid k.
  const DoubleDouble stack_within = (blocks.within_total - blocks.within[k]) +
                                    (blocks.cross_total - blocks.row_cross[k] * 2.0);
  return mmd2_from_sums(blocks.within[k], m, stack_within, stack, blocks.row_cross[k]);
}

double mmd2_population_gaussian(GaussianMoments p, GaussianMoments q, double sigma) {
  if (!(p.variance > 0.0) || !(q.variance > 0.0)) {
    throw InvalidInput("Gaussian variances must be positive");
  }
  if (!(sigma > 0.0)) throw InvalidInput("kernel bandwidth must be positive");
  const double s2 = sigma * sigma;
  // x - y ~ N(mu, tau2) for independent x ~ a, y ~ b.
  auto expected_kernel = [s2](GaussianMoments a, GaussianMoments b) {
    const double mu = a.mean - b.mean;
    const double spread = s2 + a.variance + b.variance;
    return std::sqrt(s2 / spread) * std::exp(-mu * mu / (2.0 * spread));
  };
  return expected_kernel(p, p) - 2.0 * expected_kernel(p, q) + expected_kernel(q, q);
}

double mixture_effective_mmd2(double epsilon, double mmd2_tilde) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("mixture weight must lie in (0, 1], got " + std::to_string(epsilon));
  }
  if (!(mmd2_tilde >= 0.0)) throw InvalidInput("population MMD^2 must be nonnegative");
  return epsilon * epsilon * mmd2_tilde;
}

}  // namespace mmdscan
