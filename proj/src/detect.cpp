#include "mmdscan/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmdscan/errors.hpp"
#include "mmdscan/estimator.hpp"
#include "mmdscan/parallel.hpp"
#include "mmdscan/random.hpp"

namespace mmdscan {
namespace {

std::vector<std::size_t> ranked_prefix(std::span<const double> scores, std::size_t s,
                                       bool largest) {
  if (s > scores.size()) {
    throw InvalidInput("cannot select " + std::to_string(s) + " of " +
                       std::to_string(scores.size()) + " scores");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return largest ? scores[a] > scores[b] : scores[a] < scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                    before);
  order.resize(s);
  std::sort(order.begin(), order.end());
  return order;
}

void check_top_s(std::size_t s, std::size_t n) {
  if (s < 1 || s + 1 > n) {
    throw InvalidInput("s must satisfy 1 <= s <= n - 1 (s = " + std::to_string(s) +
                       ", n = " + std::to_string(n) + ")");
  }
}

void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("threshold must be a finite value >= 0, got " + std::to_string(delta));
  }
}

}  // namespace

std::vector<double> score_all(const Dataset& d, const DetectorConfig& cfg) {
  if (cfg.scenario == Scenario::WithReference) {
    if (cfg.subsample_l) throw InvalidInput("subsampling applies to leave-one-out scoring only");
    if (!d.has_reference()) {
      throw InvalidState("reference scenario requires a dataset with a reference sequence");
    }
  } else if (cfg.subsample_l) {
    return subsampled_loo_scores(d, *cfg.subsample_l, cfg.seed, cfg.kernel);
  }

  const bool ref = cfg.scenario == Scenario::WithReference;
  const GramBlocks blocks = build_gram_blocks(d, cfg.kernel, cfg.workers,
                                              ref ? GramScope::ReferenceOnly : GramScope::Full);
  std::vector<double> scores(d.n());
  for (std::size_t k = 0; k < d.n(); ++k) {
    scores[k] = ref ? mmd2_ref(k, d, blocks) : mmd2_loo(k, d, blocks);
  }
  return scores;
}

std::vector<double> subsampled_loo_scores(const Dataset& d, std::size_t l, std::uint64_t seed,
                                          const KernelSpec& kernel) {
  const std::size_t n = d.n();
  if (l < 1 || l + 1 > n) {
    throw InvalidInput("subsample size l must satisfy 1 <= l <= n - 1 (l = " +
                       std::to_string(l) + ", n = " + std::to_string(n) + ")");
  }
  const auto kp = simd::KernelParams::from(kernel);
  const std::size_t m = d.m();

  std::vector<DoubleDouble> within(n);
  for (std::size_t k = 0; k < n; ++k) within[k] = simd::within_sum(d.sequence(k).view(), kp);

  std::vector<double> scores(n);
  std::vector<std::size_t> others;
  std::vector<std::size_t> picked;
  for (std::size_t k = 0; k < n; ++k) {
    others.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k) others.push_back(i);
    }
    picked.clear();
    Rng rng(derive_seed(seed, {k}));
    std::sample(others.begin(), others.end(), std::back_inserter(picked), l, rng);

    DoubleDouble stack_within;
    DoubleDouble cross_k;
    for (std::size_t a = 0; a < picked.size(); ++a) {
      const auto va = d.sequence(picked[a]).view();
      stack_within += within[picked[a]];
      for (std::size_t b = a + 1; b < picked.size(); ++b) {
        stack_within += simd::cross_sum(va, d.sequence(picked[b]).view(), kp) * 2.0;
      }
      cross_k += simd::cross_sum(d.sequence(k).view(), va, kp);
    }
    scores[k] = mmd2_from_sums(within[k], m, stack_within, l * m, cross_k);
  }
  return scores;
}

std::size_t select_argmax(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInput("argmax over an empty score vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

std::vector<std::size_t> select_top_s(std::span<const double> scores, std::size_t s) {
  return ranked_prefix(scores, s, true);
}

std::vector<std::size_t> select_bottom_s(std::span<const double> scores, std::size_t s) {
  return ranked_prefix(scores, s, false);
}

std::vector<std::size_t> select_threshold(std::span<const double> scores, double delta) {
  check_delta(delta);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k] > delta) out.push_back(k);
  }
  return out;
}

DetectionResult detect(const Dataset& d, const DetectorConfig& cfg) {
  // Validate the mode before paying for scoring.
  if (const auto* top = std::get_if<TopS>(&cfg.mode)) check_top_s(top->s, d.n());
  if (const auto* thr = std::get_if<Threshold>(&cfg.mode)) check_delta(thr->delta);

  DetectionResult result;
  result.scores = score_all(d, cfg);
  std::visit(
      [&](const auto& mode) {
        using M = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<M, ArgMax>) {
          result.flagged = {select_argmax(result.scores)};
        } else if constexpr (std::is_same_v<M, TopS>) {
          const bool swap = cfg.majority_anomalous && cfg.scenario == Scenario::LeaveOneOut;
          result.flagged = swap ? select_bottom_s(result.scores, mode.s)
                                : select_top_s(result.scores, mode.s);
        } else {
          result.flagged = select_threshold(result.scores, mode.delta);
          result.threshold_used = mode.delta;
        }
      },
      cfg.mode);
  return result;
}

std::size_t detect_argmax(const Dataset& d, const DetectorConfig& cfg) {
  return select_argmax(score_all(d, cfg));
}

std::vector<std::size_t> detect_top_s(const Dataset& d, const DetectorConfig& cfg, std::size_t s) {
  DetectorConfig c = cfg;
  c.mode = TopS{s};
  return detect(d, c).flagged;
}

std::vector<std::size_t> detect_threshold(const Dataset& d, const DetectorConfig& cfg,
                                          double delta) {
  DetectorConfig c = cfg;
  c.mode = Threshold{delta};
  return detect(d, c).flagged;
}

std::vector<std::size_t> detect_loo_subsampled(const Dataset& d, std::size_t s, std::size_t l,
                                               std::uint64_t seed, const KernelSpec& kernel) {
  check_top_s(s, d.n());
  return select_top_s(subsampled_loo_scores(d, l, seed, kernel), s);
}

double default_delta(std::size_t n) {
  if (n < 2) throw InvalidInput("default threshold needs n >= 2");
  return std::pow(std::log(static_cast<double>(n)), -0.7);
}

std::size_t default_subsample_l(std::size_t n, std::size_t s) {
  if (n < 2) throw InvalidInput("subsampling needs n >= 2");
  const auto l = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s * n))));
  return std::clamp<std::size_t>(l, 1, n - 1);
}

std::vector<double> baseline_t_scores(const Dataset& d) {
  const Sequence& ref = d.reference();
  if (d.dim() != 1) throw InvalidInput("the t-test baseline supports 1-D samples only");

  auto moments = [](const Sequence& s) {
    double mean = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) mean += s.at(j);
    mean /= static_cast<double>(s.size());
    double ss = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) ss += (s.at(j) - mean) * (s.at(j) - mean);
    return std::pair{mean, ss / static_cast<double>(s.size() - 1)};
  };

  const auto [ref_mean, ref_var] = moments(ref);
  const double ref_n = static_cast<double>(ref.size());
  std::vector<double> scores(d.n());
  for (std::size_t k = 0; k < d.n(); ++k) {
    const auto [mean, var] = moments(d.sequence(k));
    const double se2 = ref_var / ref_n + var / static_cast<double>(d.m());
    scores[k] = se2 > 0.0 ? std::abs(mean - ref_mean) / std::sqrt(se2) : 0.0;
  }
  return scores;
}

}  // namespace mmdscan
