#include "mmdscan/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "mmdscan/errors.hpp"
#include "mmdscan/parallel.hpp"
#include "mmdscan/random.hpp"

namespace mmdscan {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t count_common(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return common;
}

}  // namespace

std::size_t MRule::apply(std::size_t n, std::size_t s) const {
  if (name == "log-power") {
    if (n < 2 || s + 1 >= n) throw InvalidInput("log-power m rule needs n >= 2 and s <= n - 2");
    const double ln_n = std::log(static_cast<double>(n));
    const double m = std::ceil(coef * std::pow(ln_n, power) * std::log(static_cast<double>(n - s)));
    return std::max<std::size_t>(2, static_cast<std::size_t>(m));
  }
  if (name == "constant") {
    if (!(value >= 2.0)) throw InvalidInput("constant m rule needs value >= 2");
    return static_cast<std::size_t>(value);
  }
  throw InvalidInput("unknown m rule '" + name + "' (expected log-power or constant)");
}

double DeltaRule::apply(std::size_t n) const {
  if (name == "inverse-log-power") {
    if (n < 2) throw InvalidInput("inverse-log-power delta rule needs n >= 2");
    return std::pow(std::log(static_cast<double>(n)), -power);
  }
  if (name == "constant") {
    if (!(value >= 0.0)) throw InvalidInput("constant delta rule needs value >= 0");
    return value;
  }
  throw InvalidInput("unknown delta rule '" + name +
                     "' (expected inverse-log-power or constant)");
}

void validate(const ExperimentSpec& spec) {
  validate(spec.p);
  validate(spec.q);
  if (spec.trials < 1) throw InvalidInput("trials must be >= 1");
  if (spec.n_grid.empty() || spec.s_values.empty()) {
    throw InvalidInput("n and s grids must be nonempty");
  }
  const bool top_s = std::holds_alternative<TopS>(spec.detector.mode);
  for (std::size_t n : spec.n_grid) {
    if (n < 2) throw InvalidInput("every n must be >= 2");
    for (std::size_t s : spec.s_values) {
      if (s >= n) throw InvalidInput("every s must be <= n - 1");
      if (top_s && s < 1) throw InvalidInput("top-s detection needs s >= 1");
    }
  }
  if (spec.sweep == SweepAxis::M) {
    if (spec.m_grid.empty()) throw InvalidInput("m grid must be nonempty for a sweep over m");
    for (std::size_t m : spec.m_grid) {
      if (m < 2) throw InvalidInput("every m must be >= 2");
    }
  } else {
    if (!spec.schedule) throw InvalidInput("a sweep over n needs an m/delta schedule");
    // Surfaces unknown rule names before any work starts.
    for (std::size_t n : spec.n_grid) {
      for (std::size_t s : spec.s_values) spec.schedule->m_rule.apply(n, s);
      spec.schedule->delta_rule.apply(n);
    }
  }
  if (spec.detector.scenario == Scenario::WithReference &&
      (spec.subsample_auto || spec.detector.subsample_l)) {
    throw InvalidInput("subsampling applies to leave-one-out scoring only");
  }
}

std::vector<std::vector<GridPoint>> resolve_series(const ExperimentSpec& spec) {
  validate(spec);
  const bool threshold = std::holds_alternative<Threshold>(spec.detector.mode);
  std::vector<std::vector<GridPoint>> out;
  if (spec.sweep == SweepAxis::M) {
    for (std::size_t n : spec.n_grid) {
      for (std::size_t s : spec.s_values) {
        std::vector<GridPoint> series;
        for (std::size_t m : spec.m_grid) {
          GridPoint pt{n, s, m, std::nullopt};
          if (threshold && spec.delta_auto) pt.delta = default_delta(n);
          series.push_back(pt);
        }
        out.push_back(std::move(series));
      }
    }
  } else {
    for (std::size_t s : spec.s_values) {
      std::vector<GridPoint> series;
      for (std::size_t n : spec.n_grid) {
        GridPoint pt{n, s, spec.schedule->m_rule.apply(n, s), std::nullopt};
        if (threshold) pt.delta = spec.schedule->delta_rule.apply(n);
        series.push_back(pt);
      }
      out.push_back(std::move(series));
    }
  }
  return out;
}

TrialOutcome run_trial(const ExperimentSpec& spec, const GridPoint& point,
                       std::size_t trial_index) {
  TrialOutcome outcome;
  outcome.seed = derive_seed(spec.master_seed, {point.n, point.s, point.m, trial_index});

  const bool with_ref = spec.detector.scenario == Scenario::WithReference;
  const Dataset data =
      make_dataset(point.n, point.s, spec.p, spec.q, point.m, with_ref, outcome.seed);

  DetectorConfig cfg = spec.detector;
  cfg.workers = 1;
  cfg.seed = derive_seed(outcome.seed, {3});
  if (auto* top = std::get_if<TopS>(&cfg.mode)) top->s = point.s;
  if (auto* thr = std::get_if<Threshold>(&cfg.mode); thr && point.delta) thr->delta = *point.delta;
  if (spec.subsample_auto) cfg.subsample_l = default_subsample_l(point.n, std::max<std::size_t>(point.s, 1));

  outcome.flagged = detect(data, cfg).flagged;
  outcome.truth = data.truth().value_or(std::vector<std::size_t>{});
  outcome.error = outcome.flagged != outcome.truth;
  return outcome;
}

ErrorCurve run_series(const ExperimentSpec& spec, const std::vector<GridPoint>& series) {
  ErrorCurve curve;
  curve.axis = spec.sweep;
  curve.points = series;
  std::vector<TrialOutcome> outcomes(spec.trials);
  for (const GridPoint& pt : series) {
    parallel_for(spec.trials, spec.workers,
                 [&](std::size_t t) { outcomes[t] = run_trial(spec, pt, t); });

    // Ordered reduction keyed by trial index.
    std::size_t errors = 0;
    double precision = 0.0;
    double recall = 0.0;
    for (const TrialOutcome& o : outcomes) {
      errors += o.error ? 1 : 0;
      const double hit = static_cast<double>(count_common(o.flagged, o.truth));
      precision += o.flagged.empty() ? 1.0 : hit / static_cast<double>(o.flagged.size());
      recall += o.truth.empty() ? 1.0 : hit / static_cast<double>(o.truth.size());
    }
    const double trials = static_cast<double>(spec.trials);
    const double rate = static_cast<double>(errors) / trials;
    curve.x.push_back(static_cast<double>(spec.sweep == SweepAxis::M ? pt.m : pt.n));
    curve.error_rate.push_back(rate);
    curve.stderr_rate.push_back(std::sqrt(rate * (1.0 - rate) / trials));
    curve.trials.push_back(spec.trials);
    curve.precision.push_back(precision / trials);
    curve.recall.push_back(recall / trials);
  }
  return curve;
}

std::vector<ErrorCurve> run_curves(const ExperimentSpec& spec) {
  std::vector<ErrorCurve> curves;
  for (const auto& series : resolve_series(spec)) curves.push_back(run_series(spec, series));
  return curves;
}

ErrorCurve run_curve(const ExperimentSpec& spec) {
  if (spec.sweep != SweepAxis::M) throw InvalidInput("run_curve sweeps over m");
  auto series = resolve_series(spec);
  if (series.size() != 1) throw InvalidInput("run_curve needs exactly one (n, s) pair");
  return run_series(spec, series.front());
}

ErrorCurve run_consistency_sweep(const ExperimentSpec& spec) {
  if (spec.sweep != SweepAxis::N) throw InvalidInput("consistency sweeps run over n");
  if (!std::holds_alternative<Threshold>(spec.detector.mode)) {
    throw InvalidInput("consistency sweeps use the threshold detector");
  }
  auto series = resolve_series(spec);
  if (series.size() != 1) throw InvalidInput("consistency sweep needs exactly one s");
  return run_series(spec, series.front());
}

void write_curve_csv(std::ostream& out, const ErrorCurve& curve) {
  out << "x,error_rate,stderr,trials\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out << format_double(curve.x[i]) << ',' << format_double(curve.error_rate[i]) << ','
        << format_double(curve.stderr_rate[i]) << ',' << curve.trials[i] << '\n';
  }
}

}  // namespace mmdscan
