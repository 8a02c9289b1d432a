#pragma once

// Independent oracles and fixtures shared by the test binaries. Nothing here
// calls into the block-sum kernels: estimators are re-derived with plain
// loops over eval_kernel. Accumulators are long double because near-zero
// MMD values cancel hard, and the oracle's own rounding must stay well
// under the tolerances it is compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mmdscan/dataset.hpp"
#include "mmdscan/kernel.hpp"

namespace mmdscan::testing {

/// Direct transcription of the three-term U-statistic.
inline double naive_mmd2(const Sequence& x, const Sequence& y, const KernelSpec& spec) {
  const std::size_t l1 = x.size();
  const std::size_t l2 = y.size();
  long double xx = 0.0L;
  for (std::size_t i = 0; i < l1; ++i) {
    for (std::size_t j = 0; j < l1; ++j) {
      if (i != j) xx += eval_kernel(spec, x.point(i), x.point(j));
    }
  }
  long double yy = 0.0L;
  for (std::size_t i = 0; i < l2; ++i) {
    for (std::size_t j = 0; j < l2; ++j) {
      if (i != j) yy += eval_kernel(spec, y.point(i), y.point(j));
    }
  }
  long double xy = 0.0L;
  for (std::size_t i = 0; i < l1; ++i) {
    for (std::size_t j = 0; j < l2; ++j) xy += eval_kernel(spec, x.point(i), y.point(j));
  }
  const long double a = static_cast<long double>(l1);
  const long double b = static_cast<long double>(l2);
  return static_cast<double>(xx / (a * (a - 1.0L)) + yy / (b * (b - 1.0L)) -
                             2.0L * xy / (a * b));
}

/// sum_{i,j} k(x_i, y_j) by nested loops.
inline double naive_cross(const Sequence& x, const Sequence& y, const KernelSpec& spec) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) total += eval_kernel(spec, x.point(i), y.point(j));
  }
  return static_cast<double>(total);
}

inline double naive_within(const Sequence& x, const KernelSpec& spec) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i != j) total += eval_kernel(spec, x.point(i), x.point(j));
    }
  }
  return static_cast<double>(total);
}

/// Explicit stack of every sequence except k.
inline Sequence stack_others(const Dataset& d, std::size_t k) {
  std::vector<const Sequence*> parts;
  for (std::size_t i = 0; i < d.n(); ++i) {
    if (i != k) parts.push_back(&d.sequence(i));
  }
  return Sequence::concat(parts);
}

inline Sequence random_sequence(std::mt19937_64& rng, std::size_t m, std::size_t d,
                                double shift = 0.0, double spread = 1.0) {
  std::normal_distribution<double> g(shift, spread);
  std::vector<std::vector<double>> pts(m, std::vector<double>(d));
  for (auto& p : pts) {
    for (auto& v : p) v = g(rng);
  }
  return Sequence::from_points(pts);
}

inline Sequence constant_sequence(double value, std::size_t m) {
  return Sequence::from_scalars(std::vector<double>(m, value));
}

inline double rel_err(double got, double want) {
  const double denom = std::abs(want);
  return denom == 0.0 ? std::abs(got) : std::abs(got - want) / denom;
}

/// Monte Carlo summary: sample mean and standard error of the mean.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace mmdscan::testing
