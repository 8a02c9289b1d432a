#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmdscan/detect.hpp"
#include "mmdscan/distributions.hpp"

namespace mmdscan {

/// Named sequence-length schedule for sweeps over n.
///   "log-power": m = ceil(coef * (ln n)^power * ln(n - s))
///   "constant":  m = value
struct MRule {
  std::string name = "log-power";
  double coef = 0.28;
  double power = 1.4;
  double value = 0.0;

  std::size_t apply(std::size_t n, std::size_t s) const;
};

/// Named threshold schedule.
///   "inverse-log-power": delta = (ln n)^(-power)
///   "constant":          delta = value
struct DeltaRule {
  std::string name = "inverse-log-power";
  double power = 0.7;
  double value = 0.0;

  double apply(std::size_t n) const;
};

struct Schedule {
  MRule m_rule;
  DeltaRule delta_rule;
};

enum class SweepAxis { M, N };

/// A Monte Carlo campaign: for every grid point, `trials` fresh datasets are
/// generated and the exact-set error rate P{flagged != truth} is estimated.
struct ExperimentSpec {
  DistSpec p{GaussianDist{0.0, 1.0}};
  DistSpec q{LaplaceDist{1.0, 1.0}};
  SweepAxis sweep = SweepAxis::M;
  std::vector<std::size_t> n_grid{100};
  std::vector<std::size_t> s_values{1};
  std::vector<std::size_t> m_grid;
  /// Mode template. TopS takes s from the grid point; Threshold takes delta
  /// from the grid point when the point resolves one.
  DetectorConfig detector;
  /// Threshold mode: delta = default_delta(n) at each point.
  bool delta_auto = false;
  /// Leave-one-out: subsample l = ceil(sqrt(s n)) at each point.
  bool subsample_auto = false;
  std::size_t trials = 500;
  std::uint64_t master_seed = 0;
  /// Required for sweeps over n.
  std::optional<Schedule> schedule;
  /// Trials run in parallel; results do not depend on this.
  std::size_t workers = 1;
};

struct GridPoint {
  std::size_t n = 0;
  std::size_t s = 0;
  std::size_t m = 0;
  std::optional<double> delta;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::vector<std::size_t> flagged;
  std::vector<std::size_t> truth;
  /// flagged != truth
  bool error = false;
};

/// One error-rate series. `x` holds m for sweeps over m and n for sweeps over n.
struct ErrorCurve {
  SweepAxis axis = SweepAxis::M;
  std::vector<GridPoint> points;
  std::vector<double> x;
  std::vector<double> error_rate;
  std::vector<double> stderr_rate;
  std::vector<std::size_t> trials;
  /// Auxiliary per-index metrics, averaged over trials. Precision is 1 when
  /// nothing is flagged; recall is 1 when nothing is anomalous.
  std::vector<double> precision;
  std::vector<double> recall;
};

/// Throws InvalidInput when the spec cannot be run.
void validate(const ExperimentSpec& spec);

/// The grid, one series per (n, s) for sweeps over m and one per s for
/// sweeps over n.
std::vector<std::vector<GridPoint>> resolve_series(const ExperimentSpec& spec);

/// Deterministic per (master_seed, point, trial_index).
TrialOutcome run_trial(const ExperimentSpec& spec, const GridPoint& point,
                       std::size_t trial_index);

ErrorCurve run_series(const ExperimentSpec& spec, const std::vector<GridPoint>& series);

/// Every series of the spec.
std::vector<ErrorCurve> run_curves(const ExperimentSpec& spec);

/// Sweep over m for a spec with a single (n, s) pair.
ErrorCurve run_curve(const ExperimentSpec& spec);

/// Sweep over n with m and delta taken from the schedule (threshold
/// detector, single s).
ErrorCurve run_consistency_sweep(const ExperimentSpec& spec);

/// CSV with header `x,error_rate,stderr,trials`.
void write_curve_csv(std::ostream& out, const ErrorCurve& curve);

}  // namespace mmdscan
