#include <cmath>
#include <vector>

#include "doctest.h"
#include "derivroots/experiments.hpp"
#include "derivroots/report.hpp"
#include "derivroots/serialization.hpp"

using namespace derivroots;

TEST_CASE("quantiles and median") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(xs, 0.0) == 1.0);
  CHECK(quantile_sorted(xs, 1.0) == 4.0);
  CHECK(quantile_sorted(xs, 0.5) == 2.5);
  CHECK(quantile_sorted(xs, 0.25) == doctest::Approx(1.75));
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
}

TEST_CASE("wilson interval") {
  const Interval zero = wilson_interval(0, 10000);
  CHECK(zero.low == 0.0);
  CHECK(zero.high == doctest::Approx(3.8402e-4).epsilon(1e-3));
  const Interval half = wilson_interval(50, 100);
  CHECK(half.low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(half.high == doctest::Approx(0.5962).epsilon(1e-3));
  const Interval all = wilson_interval(20, 20);
  CHECK(all.high == doctest::Approx(1.0));
}

TEST_CASE("aggregates skip non-finite values") {
  std::vector<TrialRecord> recs;
  for (std::size_t t = 0; t < 5; ++t) {
    recs.push_back({10, t, t, 1, {{"x", static_cast<double>(t)}, {"y", t == 2 ? INFINITY : 1.0}}, 0.0});
  }
  recs.push_back({20, 0, 9, 1, {{"x", 7.0}, {"y", 2.0}}, 0.0});
  const auto aggs = aggregate_records(recs);
  REQUIRE(aggs.size() == 4);
  CHECK(aggs[0].n == 10);
  CHECK(aggs[0].metric == "x");
  CHECK(aggs[0].mean == 2.0);
  CHECK(aggs[0].median == 2.0);
  CHECK(aggs[0].q1 == 1.0);
  CHECK(aggs[0].q3 == 3.0);
  CHECK(aggs[0].standard_error == doctest::Approx(std::sqrt(2.5 / 5)));
  CHECK(aggs[1].count == 4);
  CHECK(aggs[1].nonfinite == 1);
  CHECK(aggs[3].n == 20);
  CHECK(aggs[3].standard_error == 0.0);
}

TEST_CASE("aggregates are recomputable from the CSV records") {
  ExperimentConfig cfg;
  cfg.measure = make_disk(0.0, 1.0);
  cfg.n_grid = {30, 50};
  cfg.k_rule = {KRuleKind::sqrt, 1.0};
  cfg.trials = 5;
  cfg.seed = 4;
  cfg.mobius_maps = 2;
  const TrialReport r = run_convergence(cfg);
  const auto parsed = records_from_csv(records_csv(r));
  REQUIRE(parsed.size() == r.records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].seed == r.records[i].seed);
    CHECK(parsed[i].metrics == r.records[i].metrics);
  }
  const auto again = aggregate_records(parsed);
  REQUIRE(again.size() == r.aggregates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].metric == r.aggregates[i].metric);
    CHECK(again[i].mean == r.aggregates[i].mean);
    CHECK(again[i].median == r.aggregates[i].median);
    CHECK(again[i].standard_error == r.aggregates[i].standard_error);
  }
}

TEST_CASE("same_results ignores wall time only") {
  TrialReport a;
  a.records.push_back({10, 0, 1, 1, {{"x", 1.0}}, 0.5});
  TrialReport b = a;
  b.records[0].wall_seconds = 9.0;
  CHECK(same_results(a, b));
  b.records[0].metrics[0].second = 1.0000001;
  CHECK_FALSE(same_results(a, b));
}
