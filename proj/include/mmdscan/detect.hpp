#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mmdscan/dataset.hpp"
#include "mmdscan/kernel.hpp"

namespace mmdscan {

enum class Scenario {
  /// Score each sequence against a reference drawn from the normal distribution.
  WithReference,
  /// Score each sequence against the stack of all other sequences.
  LeaveOneOut,
};

struct ArgMax {};
struct TopS {
  std::size_t s = 1;
};
struct Threshold {
  double delta = 0.0;
};
using DetectionMode = std::variant<ArgMax, TopS, Threshold>;

struct DetectorConfig {
  Scenario scenario = Scenario::WithReference;
  DetectionMode mode = ArgMax{};
  KernelSpec kernel;
  /// Leave-one-out only: compare against l randomly drawn other sequences
  /// instead of all n - 1.
  std::optional<std::size_t> subsample_l;
  /// Leave-one-out TopS only: anomalies are the majority (s/n > 1/2), so the
  /// roles of the two distributions swap and the s *smallest* scores are flagged.
  bool majority_anomalous = false;
  /// Seeds the subsample draw.
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct DetectionResult {
  /// Sorted 0-based indices.
  std::vector<std::size_t> flagged;
  std::vector<double> scores;
  std::optional<double> threshold_used;
};

/// Per-sequence MMD^2 statistics for the configured scenario. With
/// cfg.subsample_l set (leave-one-out), delegates to subsampled_loo_scores.
std::vector<double> score_all(const Dataset& d, const DetectorConfig& cfg);

/// Scores every sequence against a stack of l sequences drawn without
/// replacement from the other n - 1. Costs O(n l^2 m^2).
std::vector<double> subsampled_loo_scores(const Dataset& d, std::size_t l, std::uint64_t seed,
                                          const KernelSpec& kernel);

// Selection over a finished score vector. Ties go to the lowest index.
std::size_t select_argmax(std::span<const double> scores);
std::vector<std::size_t> select_top_s(std::span<const double> scores, std::size_t s);
std::vector<std::size_t> select_bottom_s(std::span<const double> scores, std::size_t s);
/// Strict comparison: {k : scores[k] > delta}.
std::vector<std::size_t> select_threshold(std::span<const double> scores, double delta);

/// Scores with cfg and selects per cfg.mode.
DetectionResult detect(const Dataset& d, const DetectorConfig& cfg);

std::size_t detect_argmax(const Dataset& d, const DetectorConfig& cfg);
std::vector<std::size_t> detect_top_s(const Dataset& d, const DetectorConfig& cfg, std::size_t s);
std::vector<std::size_t> detect_threshold(const Dataset& d, const DetectorConfig& cfg,
                                          double delta);
/// Low-complexity leave-one-out test for known s.
std::vector<std::size_t> detect_loo_subsampled(const Dataset& d, std::size_t s, std::size_t l,
                                               std::uint64_t seed, const KernelSpec& kernel);

/// (ln n)^(-0.7).
double default_delta(std::size_t n);
/// ceil(sqrt(s n)), clamped to [1, n - 1].
std::size_t default_subsample_l(std::size_t n, std::size_t s);

/// |Welch t statistic| between the reference and each sequence (dimension 1
/// only). With equal sample sizes the Welch and pooled-variance statistics
/// coincide. Zero variance on both sides scores 0.
std::vector<double> baseline_t_scores(const Dataset& d);

}  // namespace mmdscan
