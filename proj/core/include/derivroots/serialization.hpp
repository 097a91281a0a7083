#pragma once

#include <cstdint>
#include <string>
#include <vector>

#ifdef DERIVROOTS_VENDORED_JSON
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "derivroots/experiments.hpp"
#include "derivroots/measures.hpp"
#include "derivroots/metrics.hpp"
#include "derivroots/report.hpp"
#include "derivroots/rootfind.hpp"

namespace derivroots {

using Json = nlohmann::ordered_json;

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

// Complex numbers are [re, im]; a bare number is read as real.
Json to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& path);

// "type"-discriminated: discrete {atoms, weights}, uniform_circle and
// uniform_disk {center, radius}, cantor_segment {start, end, ratio},
// mixture {components: [{weight, measure}]}. Parsing validates and reports
// dotted field paths rooted at `path`.
Json to_json(const MeasureSpec& spec);
MeasureSpec measure_from_json(const Json& j, const std::string& path = "measure");

Json to_json(const KRule& rule);
KRule k_rule_from_json(const Json& j, const std::string& path = "k_rule");

// Unknown keys are rejected, except those listed in `extra_keys`.
Json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j, const std::vector<std::string>& extra_keys = {});

Json to_json(const PerturbationConfig& cfg);
PerturbationConfig perturbation_config_from_json(const Json& j, const std::vector<std::string>& extra_keys = {});

Json to_json(const FrostmanConfig& cfg);
FrostmanConfig frostman_config_from_json(const Json& j, const std::vector<std::string>& extra_keys = {});

Json to_json(const CounterexampleResult& r);

// Aggregates and summary rows; the records go to CSV.
Json to_json(const TrialReport& report);

// Columns n, trial, seed, k, wall_seconds, then the metrics in record order.
std::string records_csv(const TrialReport& report);
std::vector<TrialRecord> records_from_csv(const std::string& csv);

// Columns n, trial, layer, re, im, multiplicity; layer is the derivative order.
std::string scatter_csv(const std::vector<ScatterPoint>& points);
std::vector<ScatterPoint> scatter_from_csv(const std::string& csv);

// Columns re, im, multiplicity.
std::string rootset_csv(const RootSet& roots);
RootSet rootset_from_csv(const std::string& csv);

// {lhs, rhs, slack, u: [8 reals], n, k, seed}.
Json audit_record(const JensenAudit& audit, const MobiusMap& u, std::size_t n, std::size_t k,
                  std::uint64_t seed);

}  // namespace derivroots
