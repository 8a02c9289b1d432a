#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan {

/// An ordered sequence of m >= 2 samples in R^d.
///
/// Storage is dimension-major (coordinate c of sample j at c * m + j) so the
/// block-sum kernels can stream one coordinate at a time.
class Sequence {
 public:
  /// 1-D sequence. Throws InvalidInput when fewer than 2 samples.
  static Sequence from_scalars(std::vector<double> values);
  /// Throws InvalidInput on fewer than 2 points, empty points, or ragged dimensions.
  static Sequence from_points(const std::vector<std::vector<double>>& points);
  /// Consecutive groups of `dim` values form one sample.
  static Sequence from_sample_major(std::span<const double> flat, std::size_t dim);
  /// Stacks the samples of `parts` in order. All parts must share a dimension.
  static Sequence concat(std::span<const Sequence* const> parts);

  std::size_t size() const noexcept { return m_; }
  std::size_t dim() const noexcept { return d_; }

  double at(std::size_t j, std::size_t c = 0) const noexcept { return coords_[c * m_ + j]; }
  std::vector<double> point(std::size_t j) const;

  simd::BlockView view() const noexcept { return {coords_.data(), m_, d_}; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  Sequence(std::size_t m, std::size_t d, std::vector<double> coords);

  std::size_t m_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
};

/// n >= 2 sequences sharing m and d, an optional reference drawn from the
/// normal distribution, and an optional ground-truth anomalous index set.
/// Indices are 0-based throughout the library.
class Dataset {
 public:
  /// Throws InvalidInput when invariants fail.
  explicit Dataset(std::vector<Sequence> sequences, std::optional<Sequence> reference = {},
                   std::optional<std::vector<std::size_t>> truth = {});

  std::size_t n() const noexcept { return sequences_.size(); }
  std::size_t m() const noexcept { return sequences_.front().size(); }
  std::size_t dim() const noexcept { return sequences_.front().dim(); }

  const std::vector<Sequence>& sequences() const noexcept { return sequences_; }
  const Sequence& sequence(std::size_t k) const { return sequences_.at(k); }

  bool has_reference() const noexcept { return reference_.has_value(); }
  /// Throws InvalidState when absent.
  const Sequence& reference() const;
  const std::optional<Sequence>& maybe_reference() const noexcept { return reference_; }

  /// Sorted, duplicate-free.
  const std::optional<std::vector<std::size_t>>& truth() const noexcept { return truth_; }

  /// Row labels for reporting; empty or exactly n entries.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<std::string> labels);

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sequence> sequences_;
  std::optional<Sequence> reference_;
  std::optional<std::vector<std::size_t>> truth_;
  std::vector<std::string> labels_;
};

}  // namespace mmdscan
