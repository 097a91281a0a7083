#include "derivroots/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "derivroots/errors.hpp"

namespace derivroots {

std::optional<double> TrialRecord::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::nullopt;
}

std::optional<double> SummaryRow::value(const std::string& name) const {
  for (const auto& [key, v] : values) {
    if (key == name) return v;
  }
  return std::nullopt;
}

std::vector<const TrialRecord*> TrialReport::records_for(std::size_t n) const {
  std::vector<const TrialRecord*> out;
  for (const auto& r : records) {
    if (r.n == n) out.push_back(&r);
  }
  return out;
}

const Aggregate* TrialReport::aggregate(std::size_t n, const std::string& metric) const {
  for (const auto& a : aggregates) {
    if (a.n == n && a.metric == metric) return &a;
  }
  return nullptr;
}

const SummaryRow* TrialReport::summary_row(const std::string& label) const {
  for (const auto& row : summary) {
    if (row.label == label) return &row;
  }
  return nullptr;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

std::vector<Aggregate> aggregate_records(std::span<const TrialRecord> records) {
  std::vector<std::size_t> ns;
  for (const auto& r : records) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  std::vector<Aggregate> out;
  for (std::size_t n : ns) {
    std::vector<std::string> names;
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, std::size_t> nonfinite;
    for (const auto& r : records) {
      if (r.n != n) continue;
      for (const auto& [name, v] : r.metrics) {
        if (!values.contains(name)) {
          names.push_back(name);
          values[name];
          nonfinite[name] = 0;
        }
        if (std::isfinite(v)) {
          values[name].push_back(v);
        } else {
          ++nonfinite[name];
        }
      }
    }
    for (const auto& name : names) {
      std::vector<double>& v = values[name];
      Aggregate a;
      a.n = n;
      a.metric = name;
      a.count = v.size();
      a.nonfinite = nonfinite[name];
      if (!v.empty()) {
        double sum = 0.0;
        for (double x : v) sum += x;
        a.mean = sum / static_cast<double>(v.size());
        if (v.size() > 1) {
          double ss = 0.0;
          for (double x : v) ss += (x - a.mean) * (x - a.mean);
          a.standard_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        }
        std::sort(v.begin(), v.end());
        a.median = quantile_sorted(v, 0.5);
        a.q1 = quantile_sorted(v, 0.25);
        a.q3 = quantile_sorted(v, 0.75);
      } else {
        a.mean = a.median = a.q1 = a.q3 = std::nan("");
      }
      out.push_back(a);
    }
  }
  return out;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw ValidationError("trials", "must be positive");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

bool same_value(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_metrics(const MetricList& a, const MetricList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !same_value(a[i].second, b[i].second)) return false;
  }
  return true;
}

}  // namespace

bool same_results(const TrialReport& a, const TrialReport& b) {
  if (a.experiment != b.experiment || a.records.size() != b.records.size() ||
      a.summary.size() != b.summary.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.n != y.n || x.trial != y.trial || x.seed != y.seed || x.k != y.k ||
        !same_metrics(x.metrics, y.metrics)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.summary.size(); ++i) {
    if (a.summary[i].label != b.summary[i].label ||
        !same_metrics(a.summary[i].values, b.summary[i].values)) {
      return false;
    }
  }
  return true;
}

}  // namespace derivroots
