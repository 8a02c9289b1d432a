#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mmdscan/errors.hpp"
#include "mmdscan/experiments.hpp"

using namespace mmdscan;

namespace {

ExperimentSpec separated_toy() {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1e-12}};
  spec.q = {GaussianDist{10.0, 1e-12}};
  spec.n_grid = {6};
  spec.s_values = {1};
  spec.m_grid = {5, 8};
  spec.trials = 40;
  spec.master_seed = 11;
  return spec;
}

}  // namespace

TEST_CASE("m and delta rules") {
  MRule rule;
  CHECK(rule.apply(200, 10) == 16);
  CHECK(rule.apply(500, 10) == 23);
  CHECK(rule.apply(1000, 10) == 29);
  CHECK_THROWS_AS(rule.apply(10, 9), InvalidInput);
  MRule constant{"constant", 0.0, 0.0, 40.0};
  CHECK(constant.apply(1000, 3) == 40);
  CHECK_THROWS_AS((MRule{"cubic"}).apply(10, 1), InvalidInput);

  DeltaRule delta;
  CHECK(delta.apply(200) == doctest::Approx(0.3112457442157770).epsilon(1e-14));
  CHECK(delta.apply(1000) == doctest::Approx(0.2585021381379299).epsilon(1e-14));
  CHECK((DeltaRule{"constant", 0.0, 0.25}).apply(9) == 0.25);
}

TEST_CASE("separated toy never errs") {
  ExperimentSpec spec = separated_toy();
  for (Scenario sc : {Scenario::WithReference, Scenario::LeaveOneOut}) {
    spec.detector.scenario = sc;
    for (std::size_t t = 0; t < 10; ++t) {
      const TrialOutcome o = run_trial(spec, GridPoint{6, 1, 5, std::nullopt}, t);
      CHECK_FALSE(o.error);
      CHECK(o.flagged == o.truth);
    }
    const ErrorCurve c = run_curve(spec);
    CHECK(c.error_rate == std::vector<double>{0.0, 0.0});
    CHECK(c.stderr_rate == std::vector<double>{0.0, 0.0});
    CHECK(c.precision == std::vector<double>{1.0, 1.0});
    CHECK(c.x == std::vector<double>{5.0, 8.0});
  }
}

TEST_CASE("null with a large threshold never errs") {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = spec.p;
  spec.n_grid = {20};
  spec.s_values = {0};
  spec.m_grid = {10};
  spec.trials = 50;
  spec.detector.mode = Threshold{5.0};
  const ErrorCurve c = run_curve(spec);
  CHECK(c.error_rate.front() == 0.0);
  const TrialOutcome o = run_trial(spec, c.points.front(), 3);
  CHECK(o.truth.empty());
  CHECK(o.flagged.empty());
}

TEST_CASE("trial outcomes are reproducible") {
  ExperimentSpec spec = separated_toy();
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = {GaussianDist{0.5, 1.0}};
  const GridPoint pt{6, 1, 8, std::nullopt};
  const TrialOutcome a = run_trial(spec, pt, 4);
  const TrialOutcome b = run_trial(spec, pt, 4);
  CHECK(a.seed == b.seed);
  CHECK(a.flagged == b.flagged);
  CHECK(a.truth == b.truth);
  CHECK(a.error == b.error);
}

TEST_CASE("argmax under the null errs at rate 1 - 1/n") {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = spec.p;
  spec.n_grid = {5};
  spec.s_values = {1};
  spec.m_grid = {6};
  spec.trials = 4000;
  spec.master_seed = 5;
  const ErrorCurve c = run_curve(spec);
  const double want = 1.0 - 1.0 / 5.0;
  const double se = std::sqrt(want * (1.0 - want) / 4000.0);
  CAPTURE(c.error_rate.front());
  CHECK(std::abs(c.error_rate.front() - want) <= 3.0 * se);
}

TEST_CASE("curves are independent of worker count") {
  ExperimentSpec spec;
  spec.n_grid = {12};
  spec.s_values = {1, 2};
  spec.m_grid = {4, 9};
  spec.trials = 60;
  spec.master_seed = 99;
  spec.detector.scenario = Scenario::LeaveOneOut;
  spec.workers = 1;
  const auto serial = run_curves(spec);
  spec.workers = 4;
  const auto threaded = run_curves(spec);
  REQUIRE(serial.size() == 2);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].error_rate == threaded[i].error_rate);
    CHECK(serial[i].precision == threaded[i].precision);
    CHECK(serial[i].recall == threaded[i].recall);
  }
  CHECK(run_curves(spec)[1].error_rate == threaded[1].error_rate);
}

TEST_CASE("standard error halves when trials quadruple") {
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = {GaussianDist{0.3, 1.0}};
  spec.n_grid = {5};
  spec.m_grid = {6};
  spec.trials = 400;
  const double se1 = run_curve(spec).stderr_rate.front();
  spec.trials = 1600;
  const double se4 = run_curve(spec).stderr_rate.front();
  CHECK(se4 / se1 == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("consistency sweep resolves the schedule per n") {
  ExperimentSpec spec;
  spec.sweep = SweepAxis::N;
  spec.n_grid = {200, 500, 1000};
  spec.s_values = {10};
  spec.detector.mode = Threshold{};
  spec.schedule = Schedule{};
  const auto series = resolve_series(spec);
  REQUIRE(series.size() == 1);
  CHECK(series[0][0].m == 16);
  CHECK(series[0][1].m == 23);
  CHECK(series[0][2].m == 29);
  CHECK(*series[0][0].delta == doctest::Approx(0.3112457442157770));

  spec.n_grid = {20, 40};
  spec.s_values = {2};
  spec.trials = 10;
  const ErrorCurve c = run_consistency_sweep(spec);
  CHECK(c.x == std::vector<double>{20.0, 40.0});
}

TEST_CASE("invalid experiment specs") {
  ExperimentSpec spec = separated_toy();
  spec.trials = 0;
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  spec = separated_toy();
  spec.s_values = {6};
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  spec = separated_toy();
  spec.m_grid.clear();
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  spec = separated_toy();
  spec.sweep = SweepAxis::N;
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  spec = separated_toy();
  spec.subsample_auto = true;
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  spec = separated_toy();
  spec.s_values = {0};
  spec.detector.mode = TopS{};
  CHECK_THROWS_AS(validate(spec), InvalidInput);
  CHECK_THROWS_AS(run_consistency_sweep(separated_toy()), InvalidInput);
}

TEST_CASE("curve CSV layout") {
  ErrorCurve c;
  c.x = {10.0, 93.0};
  c.error_rate = {0.5, 0.02};
  c.stderr_rate = {0.25, 0.125};
  c.trials = {500, 500};
  std::ostringstream out;
  write_curve_csv(out, c);
  CHECK(out.str() == "x,error_rate,stderr,trials\n10,0.5,0.25,500\n93,0.02,0.125,500\n");
}

TEST_CASE("leave-one-out converges at least as fast as the reference test") {
  // Paired comparison: both scenarios see the same sequences at every trial.
  ExperimentSpec spec;
  spec.p = {GaussianDist{0.0, 1.0}};
  spec.q = {LaplaceDist{1.0, 1.0}};
  spec.n_grid = {100};
  spec.s_values = {1};
  spec.m_grid = {5, 10, 15, 20, 25, 30};
  spec.trials = 500;
  spec.master_seed = 2024;
  spec.detector.scenario = Scenario::WithReference;
  const ErrorCurve ref = run_curve(spec);
  spec.detector.scenario = Scenario::LeaveOneOut;
  const ErrorCurve loo = run_curve(spec);
  std::string trace;
  for (std::size_t i = 0; i < ref.x.size(); ++i) {
    trace += std::to_string(ref.x[i]) + ": ref " + std::to_string(ref.error_rate[i]) + " loo " +
             std::to_string(loo.error_rate[i]) + "\n";
  }
  CAPTURE(trace);
  for (std::size_t i = ref.x.size() / 2; i < ref.x.size(); ++i) {
    CHECK(loo.error_rate[i] <= ref.error_rate[i]);
  }
}
