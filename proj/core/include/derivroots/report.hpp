#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace derivroots {

using MetricList = std::vector<std::pair<std::string, double>>;

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // replays this trial
  std::size_t k = 0;
  MetricList metrics;
  double wall_seconds = 0.0;

  std::optional<double> metric(const std::string& name) const;
};

// Statistics of one metric over the records sharing n. Non-finite values
// are counted in `nonfinite` and left out of the rest.
struct Aggregate {
  std::size_t n = 0;
  std::string metric;
  std::size_t count = 0;
  std::size_t nonfinite = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

// Experiment-specific derived values, e.g. Wilson intervals per n.
struct SummaryRow {
  std::string label;
  MetricList values;

  std::optional<double> value(const std::string& name) const;
};

struct TrialReport {
  std::string experiment;
  std::vector<TrialRecord> records;  // ordered by (n position in grid, trial)
  std::vector<Aggregate> aggregates;
  std::vector<SummaryRow> summary;

  std::vector<const TrialRecord*> records_for(std::size_t n) const;
  const Aggregate* aggregate(std::size_t n, const std::string& metric) const;
  const SummaryRow* summary_row(const std::string& label) const;
};

// Groups by n in order of first appearance, metrics in record order.
std::vector<Aggregate> aggregate_records(std::span<const TrialRecord> records);

// Linear interpolation between order statistics; `sorted` ascending.
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::vector<double> values);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// Equality of everything except wall times.
bool same_results(const TrialReport& a, const TrialReport& b);

}  // namespace derivroots
