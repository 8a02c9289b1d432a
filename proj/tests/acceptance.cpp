// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion also has a wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmdscan/bounds.hpp"
#include "mmdscan/detect.hpp"
#include "mmdscan/distributions.hpp"
#include "mmdscan/estimator.hpp"
#include "mmdscan/experiments.hpp"
#include "mmdscan/random.hpp"
#include "mmdscan/simd/block_sums.hpp"
#include "test_support.hpp"

using namespace mmdscan;
namespace t = mmdscan::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Criterion 1.
Verdict estimator_oracle() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (const simd::Backend& b : simd::available_backends()) {
    simd::set_backend(b.name);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> size(2, 30);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    std::uniform_real_distribution<double> shift(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t d = dim(rng);
      const Sequence x = t::random_sequence(rng, size(rng), d);
      const Sequence y = t::random_sequence(rng, size(rng), d, shift(rng));
      const KernelSpec spec(trial % 2 ? KernelFamily::Laplace : KernelFamily::Gaussian, 1.0);
      worst = std::max(worst, t::rel_err(mmd2_unbiased(x, y, spec), t::naive_mmd2(x, y, spec)));
      ++cases;
    }
  }
  simd::set_backend(simd::available_backends().back().name);
  return {worst <= 1e-12, fmt("%zu pairs over all backends, max rel err %.3g", cases, worst)};
}

// Criterion 2.
Verdict loo_oracle() {
  double worst = 0.0;
  std::size_t checks = 0;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> count(2, 8);
  std::uniform_int_distribution<std::size_t> len(2, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = count(rng);
    const std::size_t m = len(rng);
    const std::size_t d = 1 + trial % 3;
    std::vector<Sequence> seqs;
    for (std::size_t k = 0; k < n; ++k) {
      seqs.push_back(t::random_sequence(rng, m, d, k == 0 ? 1.5 : 0.0));
    }
    const Dataset data(seqs);
    const KernelSpec spec(trial % 2 ? KernelFamily::Laplace : KernelFamily::Gaussian, 1.0);
    const GramBlocks g = build_gram_blocks(data, spec);
    for (std::size_t k = 0; k < n; ++k) {
      const double want = t::naive_mmd2(data.sequence(k), t::stack_others(data, k), spec);
      worst = std::max(worst, t::rel_err(mmd2_loo(k, data, g), want));
      ++checks;
    }
  }
  return {worst <= 1e-12, fmt("%zu indices in 200 datasets, max rel err %.3g", checks, worst)};
}

t::MeanSe monte_carlo_mmd(const DistSpec& p, const DistSpec& q, std::size_t m,
                          std::size_t trials, std::uint64_t seed) {
  const auto spec = KernelSpec::gaussian(1.0);
  std::vector<double> values(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const Sequence x = sample_sequence(p, m, derive_seed(seed, {i, 0}));
    const Sequence y = sample_sequence(q, m, derive_seed(seed, {i, 1}));
    values[i] = mmd2_unbiased(x, y, spec);
  }
  return t::mean_se(values);
}

// Criterion 3.
Verdict unbiasedness() {
  const DistSpec p{GaussianDist{0.0, 1.0}};
  const DistSpec q{GaussianDist{1.0, 1.0}};
  const double truth = mmd2_population_gaussian({0.0, 1.0}, {1.0, 1.0}, 1.0);
  const auto alt = monte_carlo_mmd(p, q, 200, 5000, 3);
  const auto null = monte_carlo_mmd(p, p, 200, 5000, 4);
  const double z_alt = (alt.mean - truth) / alt.se;
  const double z_null = null.mean / null.se;
  return {std::abs(z_alt) <= 3.0 && std::abs(z_null) <= 3.0,
          fmt("p!=q mean %.6f vs %.6f (z %.2f); p=q mean %.2e (z %.2f)", alt.mean, truth, z_alt,
              null.mean, z_null)};
}

// Criterion 4.
Verdict mixture_identity() {
  const DistSpec p{GaussianDist{0.0, 1.0}};
  const DistSpec q_tilde{GaussianDist{3.0, 1.0}};
  const double base = mmd2_population_gaussian({0.0, 1.0}, {3.0, 1.0}, 1.0);
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 40;
  for (double eps : {0.25, 0.5, 1.0}) {
    const auto mc = monte_carlo_mmd(p, contaminated(eps, p, q_tilde), 200, 5000, seed++);
    const double want = mixture_effective_mmd2(eps, base);
    const double z = (mc.mean - want) / mc.se;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("eps %.2f: %.5f vs %.5f (z %.2f); ", eps, mc.mean, want, z);
  }
  return {ok, detail};
}

ExperimentSpec fig2_spec() {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = {LaplaceDist{1.0, 1.0}};
  spec.n_grid = {100};
  spec.s_values = {1};
  spec.trials = 500;
  spec.detector.scenario = Scenario::WithReference;
  spec.detector.mode = ArgMax{};
  spec.detector.kernel = KernelSpec::gaussian(1.0);
  spec.workers = 0;
  return spec;
}

// Criterion 5.
Verdict consistency_trend() {
  ExperimentSpec spec = fig2_spec();
  const double ln_n = std::log(100.0);
  const auto lo = static_cast<std::size_t>(std::ceil(2.0 * ln_n));
  const auto hi = static_cast<std::size_t>(std::ceil(20.0 * ln_n));
  spec.m_grid = {lo, hi};
  spec.master_seed = 5;
  const ErrorCurve c = run_curve(spec);
  return {c.error_rate[1] < 0.05 && c.error_rate[1] < c.error_rate[0],
          fmt("m=%zu rate %.3f; m=%zu rate %.3f", lo, c.error_rate[0], hi, c.error_rate[1])};
}

// Criterion 6.
Verdict known_s_monotonicity() {
  ExperimentSpec spec = fig2_spec();
  spec.detector.mode = TopS{};
  spec.s_values = {1, 20, 40};
  spec.m_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 120, 140, 160};
  spec.master_seed = 6;
  const auto curves = run_curves(spec);
  std::vector<std::size_t> first;
  std::string detail;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const ErrorCurve& c = curves[i];
    std::size_t at = 0;
    for (std::size_t j = 0; j < c.x.size(); ++j) {
      if (c.error_rate[j] < 0.1) {
        at = c.points[j].m;
        break;
      }
    }
    first.push_back(at);
    detail += fmt("s=%zu first m %zu; ", spec.s_values[i], at);
  }
  const bool all_found = std::find(first.begin(), first.end(), 0) == first.end();
  return {all_found && std::is_sorted(first.begin(), first.end()), detail};
}

// Criterion 7.
Verdict threshold_consistency() {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 0.5}};
  spec.q = {MixtureDist{{{0.5, {LaplaceDist{-3.0, 0.5}}}, {0.5, {LaplaceDist{3.0, 0.5}}}}}};
  spec.sweep = SweepAxis::N;
  spec.n_grid = {200, 500, 1000};
  spec.s_values = {10};
  spec.trials = 300;
  spec.master_seed = 7;
  spec.detector.mode = Threshold{};
  spec.schedule = Schedule{};
  spec.workers = 0;
  const ErrorCurve c = run_consistency_sweep(spec);
  const double se = std::hypot(c.stderr_rate.front(), c.stderr_rate.back());
  const double gap = c.error_rate.front() - c.error_rate.back();
  std::string detail;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    detail += fmt("n=%zu m=%zu rate %.3f; ", c.points[i].n, c.points[i].m, c.error_rate[i]);
  }
  detail += fmt("gap %.3f vs 2 SE %.3f", gap, 2.0 * se);
  return {gap >= 2.0 * se && se > 0.0, detail};
}

// Criterion 8.
Verdict bound_arithmetic() {
  BoundSpec b;
  b.which = BoundCase::RefS1;
  b.kernel_bound = 1.0;
  b.mmd2 = 0.5;
  b.eta = 0.1;
  b.n = 100;
  bool ok = required_m(b) == 487;

  b.which = BoundCase::RefKnownS;
  b.s = 1;
  const std::uint64_t known1 = required_m(b);
  ok = ok && known1 == 486;  // floor(105.6 ln 99) + 1

  b.which = BoundCase::MixtureRefKnownS;
  b.epsilon = 0.5;
  ok = ok && evaluate_bound(b).bound == 16.0 * evaluate_bound({.which = BoundCase::RefKnownS,
                                                               .mmd2 = 0.5,
                                                               .n = 100,
                                                               .s = 1})
                                                   .bound;

  for (std::size_t s = 1; s < 100; ++s) {
    ok = ok && ref_known_s_log_term(100, s) == ref_known_s_log_term(100, 100 - s);
    ok = ok && ref_known_s_log_term(100, s) <= ref_known_s_log_term(100, 50);
  }
  ok = ok && ref_known_s_log_term(100, 30) == ref_known_s_log_term(100, 70);
  return {ok, fmt("ref-s1 %llu, ref-known-s(s=1) %llu", 487ULL,
                  static_cast<unsigned long long>(known1))};
}

// Criterion 9.
Verdict null_false_alarm() {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = spec.p;
  spec.n_grid = {200};
  spec.s_values = {0};
  spec.m_grid = {400};
  spec.trials = 300;
  spec.master_seed = 9;
  spec.detector.scenario = Scenario::WithReference;
  spec.detector.mode = Threshold{};
  spec.delta_auto = true;
  spec.workers = 0;
  const ErrorCurve c = run_curve(spec);
  return {c.error_rate.front() < 0.1,
          fmt("delta %.4f, false-alarm rate %.4f over %zu trials", *c.points.front().delta,
              c.error_rate.front(), spec.trials)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 1 2`.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  const Criterion criteria[] = {
      {1, "estimator matches naive double loop", 10.0, estimator_oracle},
      {2, "leave-one-out matches explicit stack", 30.0, loo_oracle},
      {3, "unbiasedness against closed form", 120.0, unbiasedness},
      {4, "mixture identity eps^2 scaling", 120.0, mixture_identity},
      {5, "error falls with m (reference, s=1)", 300.0, consistency_trend},
      {6, "m needed for error < 0.1 grows with s", 600.0, known_s_monotonicity},
      {7, "threshold test error falls with n", 600.0, threshold_consistency},
      {8, "bound arithmetic", 1.0, bound_arithmetic},
      {9, "false alarms under the null", 180.0, null_false_alarm},
  };

  std::printf("simd backend: %s\n", std::string(simd::active_backend().name).c_str());
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %d %s [%.2fs / %.0fs%s] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_s, in_time ? "" : " OVER BUDGET", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
