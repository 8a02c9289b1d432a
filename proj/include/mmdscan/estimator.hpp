#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mmdscan/dataset.hpp"
#include "mmdscan/double_double.hpp"
#include "mmdscan/kernel.hpp"

namespace mmdscan {

/// Unbiased U-statistic estimate of MMD^2 between the distributions behind
/// X (l1 samples) and Y (l2 samples):
///
///   1/(l1(l1-1)) sum_{i!=j} k(x_i,x_j) + 1/(l2(l2-1)) sum_{i!=j} k(y_i,y_j)
///     - 2/(l1 l2) sum_{i,j} k(x_i,y_j)
///
/// Exactly symmetric in (X, Y). Lengths may differ; both must be >= 2.
double mmd2_unbiased(const Sequence& x, const Sequence& y, const KernelSpec& spec);

/// Assembles the estimator from precomputed kernel sums. The combination is
/// carried out in double-double and rounded once.
double mmd2_from_sums(DoubleDouble within_x, std::size_t l1, DoubleDouble within_y,
                      std::size_t l2, DoubleDouble cross_xy) noexcept;

/// Which blocks build_gram_blocks fills. ReferenceOnly skips the n(n-1)/2
/// sequence pairs, which reference scoring never reads.
enum class GramScope {
  Full,
  ReferenceOnly,
};

/// Cached pairwise kernel sums for one dataset.
///
/// Building costs O(n^2 m^2) kernel evaluations once; every per-index
/// statistic afterwards is assembled in O(1). A naive leave-one-out pass
/// that re-stacks the other sequences for each index costs O(n^3 m^2).
struct GramBlocks {
  std::size_t n = 0;
  std::size_t m = 0;
  KernelSpec kernel;
  /// within[k] = sum_{i != j} k(y_ki, y_kj)
  std::vector<DoubleDouble> within;
  GramScope scope = GramScope::Full;
  /// cross[k * n + l] = sum_{i,j} k(y_ki, y_lj) for k != l; zero on the diagonal.
  /// Empty, like row_cross, for ReferenceOnly.
  std::vector<DoubleDouble> cross;
  /// row_cross[k] = sum_{l != k} cross[k][l]
  std::vector<DoubleDouble> row_cross;
  DoubleDouble within_total;
  /// Sum of cross over ordered pairs k != l.
  DoubleDouble cross_total;

  std::optional<DoubleDouble> ref_within;
  /// ref_cross[k] = sum_{i,j} k(x_i, y_kj); empty without a reference.
  std::vector<DoubleDouble> ref_cross;

  double cross_at(std::size_t k, std::size_t l) const { return cross[k * n + l].value(); }
};

/// `workers` parallelizes over the (k, l) grid; results are bitwise identical
/// for every worker count. 0 means one worker per hardware thread.
GramBlocks build_gram_blocks(const Dataset& d, const KernelSpec& spec, std::size_t workers = 1,
                             GramScope scope = GramScope::Full);

/// MMD_u^2[X, Y_k] against the reference. Throws InvalidState without one.
double mmd2_ref(std::size_t k, const Dataset& d, const GramBlocks& blocks);

/// MMD_u^2[Y_k, Ybar_k] where Ybar_k stacks the other n-1 sequences
/// ((n-1)m samples). Throws InvalidState on ReferenceOnly blocks.
double mmd2_loo(std::size_t k, const Dataset& d, const GramBlocks& blocks);

struct GaussianMoments {
  double mean = 0.0;
  double variance = 1.0;
};

/// Closed-form population MMD^2 between two 1-D Gaussians under the Gaussian
/// kernel of bandwidth sigma. Uses
///   E k(x, y) = sigma / sqrt(sigma^2 + tau^2) * exp(-mu^2 / (2 (sigma^2 + tau^2)))
/// with mu, tau^2 the mean and variance of x - y.
double mmd2_population_gaussian(GaussianMoments p, GaussianMoments q, double sigma);

/// MMD^2[p, (1-eps) p + eps q~] = eps^2 MMD^2[p, q~].
double mixture_effective_mmd2(double epsilon, double mmd2_tilde);

}  // namespace mmdscan
