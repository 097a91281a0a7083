#include "derivroots/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include "derivroots/errors.hpp"

namespace derivroots {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(join(path, key), "missing required field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ValidationError(path, "expected a nonnegative integer");
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  std::vector<double> out;
  const Json& a = array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], index(path, i)));
  return out;
}

std::vector<std::size_t> sizes(const Json& j, const std::string& path) {
  std::vector<std::size_t> out;
  const Json& a = array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(unsigned_integer(a[i], index(path, i)));
  return out;
}

std::vector<Complex> complexes(const Json& j, const std::string& path) {
  std::vector<Complex> out;
  const Json& a = array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(complex_from_json(a[i], index(path, i)));
  return out;
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed,
                const std::vector<std::string>& extra = {}) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ||
                       std::find(extra.begin(), extra.end(), key) != extra.end();
    if (!known) throw ValidationError(join(path, key), "unknown field");
  }
}

template <class T>
void optional_field(const Json& j, const char* key, const std::string& path, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  const std::string p = join(path, key);
  if constexpr (std::is_same_v<T, double>) {
    out = number(*it, p);
  } else if constexpr (std::is_same_v<T, bool>) {
    out = boolean(*it, p);
  } else if constexpr (std::is_same_v<T, Complex>) {
    out = complex_from_json(*it, p);
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    out = unsigned_integer(*it, p);
  } else if constexpr (std::is_same_v<T, std::size_t>) {
    out = static_cast<std::size_t>(unsigned_integer(*it, p));
  } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
    out = sizes(*it, p);
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    out = numbers(*it, p);
  } else if constexpr (std::is_same_v<T, std::vector<Complex>>) {
    out = complexes(*it, p);
  } else if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) {
    out = unsigned_integer(*it, p);
  } else {
    static_assert(sizeof(T) == 0, "unsupported field type");
  }
}

MeasureSpec parse_measure(const Json& j, const std::string& path) {
  const std::string type = text(require(j, "type", path), join(path, "type"));
  if (type == "discrete") {
    check_keys(j, path, {"type", "atoms", "weights"});
    return {Discrete{complexes(require(j, "atoms", path), join(path, "atoms")),
                     numbers(require(j, "weights", path), join(path, "weights"))}};
  }
  if (type == "uniform_circle" || type == "uniform_disk") {
    check_keys(j, path, {"type", "center", "radius"});
    Complex center{};
    optional_field(j, "center", path, center);
    const double radius = number(require(j, "radius", path), join(path, "radius"));
    if (type == "uniform_circle") return {UniformCircle{center, radius}};
    return {UniformDisk{center, radius}};
  }
  if (type == "cantor_segment") {
    check_keys(j, path, {"type", "start", "end", "ratio"});
    return {CantorSegment{complex_from_json(require(j, "start", path), join(path, "start")),
                          complex_from_json(require(j, "end", path), join(path, "end")),
                          number(require(j, "ratio", path), join(path, "ratio"))}};
  }
  if (type == "mixture") {
    check_keys(j, path, {"type", "components"});
    const std::string cpath = join(path, "components");
    const Json& list = array(require(j, "components", path), cpath);
    Mixture m;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ip = index(cpath, i);
      check_keys(list[i], ip, {"weight", "measure"});
      m.components.push_back({number(require(list[i], "weight", ip), join(ip, "weight")),
                              parse_measure(require(list[i], "measure", ip), join(ip, "measure"))});
    }
    return {m};
  }
  throw ValidationError(join(path, "type"), "unknown measure type '" + type + "'");
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError(path, "expected [re, im] or a number");
}

Json to_json(const MeasureSpec& spec) {
  return std::visit(
      [](const auto& law) -> Json {
        using T = std::decay_t<decltype(law)>;
        Json j;
        if constexpr (std::is_same_v<T, Discrete>) {
          j["type"] = "discrete";
          j["atoms"] = Json::array();
          for (Complex a : law.atoms) j["atoms"].push_back(to_json(a));
          j["weights"] = law.weights;
        } else if constexpr (std::is_same_v<T, UniformCircle> || std::is_same_v<T, UniformDisk>) {
          j["type"] = std::is_same_v<T, UniformCircle> ? "uniform_circle" : "uniform_disk";
          j["center"] = to_json(law.center);
          j["radius"] = law.radius;
        } else if constexpr (std::is_same_v<T, CantorSegment>) {
          j["type"] = "cantor_segment";
          j["start"] = to_json(law.start);
          j["end"] = to_json(law.end);
          j["ratio"] = law.ratio;
        } else {
          j["type"] = "mixture";
          j["components"] = Json::array();
          for (const auto& c : law.components) {
            j["components"].push_back({{"weight", c.weight}, {"measure", to_json(c.measure)}});
          }
        }
        return j;
      },
      spec.law);
}

MeasureSpec measure_from_json(const Json& j, const std::string& path) {
  MeasureSpec spec = parse_measure(j, path);
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    const std::string field = e.field().empty() ? path : join(path, e.field());
    const std::string what = e.what();
    const std::string prefix = e.field() + ": ";
    throw ValidationError(field, what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
  }
  return spec;
}

Json to_json(const KRule& rule) { return {{"kind", to_string(rule.kind)}, {"c", rule.c}}; }

KRule k_rule_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"kind", "c"});
  KRule rule;
  try {
    rule.kind = parse_k_rule(text(require(j, "kind", path), join(path, "kind")));
  } catch (const ValidationError& e) {
    if (e.field() == "k_rule.kind") throw ValidationError(join(path, "kind"), "unknown k rule");
    throw;
  }
  optional_field(j, "c", path, rule.c);
  return rule;
}

namespace {

// Rethrows a config validation error with the message stripped of its
// field prefix, so the CLI prints "field: message" once.
[[noreturn]] void rethrow_field(const ValidationError& e) {
  const std::string what = e.what();
  const std::string prefix = e.field() + ": ";
  throw ValidationError(e.field(), what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
}

}  // namespace

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["measure"] = to_json(cfg.measure);
  j["n_grid"] = cfg.n_grid;
  j["k_rule"] = to_json(cfg.k_rule);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["epsilon"] = cfg.epsilon;
  j["eval_point"] = to_json(cfg.eval_point);
  j["method"] = to_string(cfg.method);
  j["reference_size"] = cfg.reference_size;
  j["mobius_maps"] = cfg.mobius_maps;
  j["hull_tolerance"] = cfg.hull_tolerance;
  j["k_values"] = cfg.k_values;
  j["grid_points"] = cfg.grid_points;
  if (cfg.replay_seed) j["replay_seed"] = *cfg.replay_seed;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, const std::vector<std::string>& extra_keys) {
  check_keys(j, "",
             {"measure", "n_grid", "k_rule", "trials", "seed", "epsilon", "eval_point", "method",
              "reference_size", "mobius_maps", "hull_tolerance", "k_values", "grid_points", "replay_seed"},
             extra_keys);
  ExperimentConfig cfg;
  cfg.measure = measure_from_json(require(j, "measure", ""), "measure");
  cfg.n_grid = sizes(require(j, "n_grid", ""), "n_grid");
  if (j.contains("k_rule")) cfg.k_rule = k_rule_from_json(j["k_rule"], "k_rule");
  optional_field(j, "trials", "", cfg.trials);
  optional_field(j, "seed", "", cfg.seed);
  optional_field(j, "epsilon", "", cfg.epsilon);
  optional_field(j, "eval_point", "", cfg.eval_point);
  if (j.contains("method")) {
    try {
      cfg.method = parse_derivative_method(text(j["method"], "method"));
    } catch (const ValidationError&) {
      throw ValidationError("method", "expected \"ratio\" or \"coefficient\"");
    }
  }
  optional_field(j, "reference_size", "", cfg.reference_size);
  optional_field(j, "mobius_maps", "", cfg.mobius_maps);
  optional_field(j, "hull_tolerance", "", cfg.hull_tolerance);
  optional_field(j, "k_values", "", cfg.k_values);
  optional_field(j, "grid_points", "", cfg.grid_points);
  optional_field(j, "replay_seed", "", cfg.replay_seed);
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    rethrow_field(e);
  }
  return cfg;
}

Json to_json(const PerturbationConfig& cfg) {
  Json j;
  j["mu"] = to_json(cfg.mu);
  j["nu"] = to_json(cfg.nu);
  j["alpha"] = {{"c", cfg.alpha.c}, {"exponent", cfg.alpha.exponent}};
  j["k_rule"] = to_json(cfg.k_rule);
  j["n_grid"] = cfg.n_grid;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["deterministic_split"] = cfg.deterministic_split;
  j["chernoff_delta"] = cfg.chernoff_delta;
  j["method"] = to_string(cfg.method);
  j["reference_size"] = cfg.reference_size;
  j["hull_tolerance"] = cfg.hull_tolerance;
  if (cfg.replay_seed) j["replay_seed"] = *cfg.replay_seed;
  return j;
}

PerturbationConfig perturbation_config_from_json(const Json& j, const std::vector<std::string>& extra_keys) {
  check_keys(j, "",
             {"mu", "nu", "alpha", "k_rule", "n_grid", "trials", "seed", "deterministic_split",
              "chernoff_delta", "method", "reference_size", "hull_tolerance", "replay_seed"},
             extra_keys);
  PerturbationConfig cfg;
  cfg.mu = measure_from_json(require(j, "mu", ""), "mu");
  cfg.nu = measure_from_json(require(j, "nu", ""), "nu");
  const Json& alpha = require(j, "alpha", "");
  check_keys(alpha, "alpha", {"c", "exponent"});
  cfg.alpha.c = number(require(alpha, "c", "alpha"), "alpha.c");
  optional_field(alpha, "exponent", "alpha", cfg.alpha.exponent);
  if (j.contains("k_rule")) cfg.k_rule = k_rule_from_json(j["k_rule"], "k_rule");
  cfg.n_grid = sizes(require(j, "n_grid", ""), "n_grid");
  optional_field(j, "trials", "", cfg.trials);
  optional_field(j, "seed", "", cfg.seed);
  optional_field(j, "deterministic_split", "", cfg.deterministic_split);
  optional_field(j, "chernoff_delta", "", cfg.chernoff_delta);
  if (j.contains("method")) {
    try {
      cfg.method = parse_derivative_method(text(j["method"], "method"));
    } catch (const ValidationError&) {
      throw ValidationError("method", "expected \"ratio\" or \"coefficient\"");
    }
  }
  optional_field(j, "reference_size", "", cfg.reference_size);
  optional_field(j, "hull_tolerance", "", cfg.hull_tolerance);
  optional_field(j, "replay_seed", "", cfg.replay_seed);
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    rethrow_field(e);
  }
  return cfg;
}

Json to_json(const FrostmanConfig& cfg) {
  Json j;
  j["measure"] = to_json(cfg.measure);
  j["sample_size"] = cfg.sample_size;
  j["probes"] = Json::array();
  for (Complex p : cfg.probes) j["probes"].push_back(to_json(p));
  j["probe_count"] = cfg.probe_count;
  j["r_grid"] = cfg.r_grid;
  j["seed"] = cfg.seed;
  j["positive_threshold"] = cfg.positive_threshold;
  return j;
}

FrostmanConfig frostman_config_from_json(const Json& j, const std::vector<std::string>& extra_keys) {
  check_keys(j, "", {"measure", "sample_size", "probes", "probe_count", "r_grid", "seed", "positive_threshold"},
             extra_keys);
  FrostmanConfig cfg;
  cfg.measure = measure_from_json(require(j, "measure", ""), "measure");
  optional_field(j, "sample_size", "", cfg.sample_size);
  optional_field(j, "probes", "", cfg.probes);
  optional_field(j, "probe_count", "", cfg.probe_count);
  cfg.r_grid = numbers(require(j, "r_grid", ""), "r_grid");
  optional_field(j, "seed", "", cfg.seed);
  optional_field(j, "positive_threshold", "", cfg.positive_threshold);
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    rethrow_field(e);
  }
  return cfg;
}

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const CounterexampleResult& r) {
  return {{"q", r.q},
          {"k", r.k},
          {"m", r.m},
          {"trials", r.trials},
          {"p_exact", r.p_exact},
          {"p_hat", r.p_hat},
          {"se", r.se},
          {"deviation_se", r.deviation_se},
          {"p_hat_wilson", {r.p_hat_interval.low, r.p_hat_interval.high}},
          {"p_sum_zero", r.p_sum_zero},
          {"p_sum_zero_wilson", {r.p_sum_zero_interval.low, r.p_sum_zero_interval.high}}};
}

Json to_json(const TrialReport& report) {
  Json j;
  j["experiment"] = report.experiment;
  j["records"] = report.records.size();
  j["aggregates"] = Json::array();
  for (const auto& a : report.aggregates) {
    j["aggregates"].push_back({{"n", a.n},
                               {"metric", a.metric},
                               {"count", a.count},
                               {"nonfinite", a.nonfinite},
                               {"mean", number_or_null(a.mean)},
                               {"standard_error", number_or_null(a.standard_error)},
                               {"median", number_or_null(a.median)},
                               {"q1", number_or_null(a.q1)},
                               {"q3", number_or_null(a.q3)}});
  }
  j["summary"] = Json::array();
  for (const auto& row : report.summary) {
    Json values = Json::object();
    for (const auto& [key, v] : row.values) values[key] = number_or_null(v);
    j["summary"].push_back({{"label", row.label}, {"values", values}});
  }
  return j;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ValidationError("csv", "malformed number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::string& csv, std::vector<std::string>& header) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv", "missing header");
  header = split_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("csv", "row " + std::to_string(rows.size() + 1) + " has " +
                                       std::to_string(cells.size()) + " cells, expected " +
                                       std::to_string(header.size()));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string records_csv(const TrialReport& report) {
  std::vector<std::string> names;
  for (const auto& r : report.records) {
    for (const auto& [name, v] : r.metrics) {
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
  }
  std::string out = "n,trial,seed,k,wall_seconds";
  for (const auto& name : names) out += "," + name;
  out += "\n";
  for (const auto& r : report.records) {
    out += std::to_string(r.n) + "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.k) + "," + format_double(r.wall_seconds);
    for (const auto& name : names) {
      out += ",";
      if (const auto v = r.metric(name)) out += format_double(*v);
    }
    out += "\n";
  }
  return out;
}

std::vector<TrialRecord> records_from_csv(const std::string& csv) {
  std::vector<std::string> header;
  const auto rows = read_rows(csv, header);
  if (header.size() < 5 || header[0] != "n" || header[4] != "wall_seconds") {
    throw ValidationError("csv", "not a trial record table");
  }
  std::vector<TrialRecord> out;
  for (const auto& row : rows) {
    TrialRecord r;
    r.n = std::stoull(row[0]);
    r.trial = std::stoull(row[1]);
    r.seed = std::stoull(row[2]);
    r.k = std::stoull(row[3]);
    r.wall_seconds = parse_double(row[4]);
    for (std::size_t c = 5; c < row.size(); ++c) {
      if (!row[c].empty()) r.metrics.emplace_back(header[c], parse_double(row[c]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string scatter_csv(const std::vector<ScatterPoint>& points) {
  std::string out = "n,trial,layer,re,im,multiplicity\n";
  for (const auto& p : points) {
    out += std::to_string(p.n) + "," + std::to_string(p.trial) + "," + std::to_string(p.order) + "," +
           format_double(p.z.real()) + "," + format_double(p.z.imag()) + "," + std::to_string(p.multiplicity) +
           "\n";
  }
  return out;
}

std::vector<ScatterPoint> scatter_from_csv(const std::string& csv) {
  std::vector<std::string> header;
  const auto rows = read_rows(csv, header);
  if (header != std::vector<std::string>{"n", "trial", "layer", "re", "im", "multiplicity"}) {
    throw ValidationError("csv", "expected columns n,trial,layer,re,im,multiplicity");
  }
  std::vector<ScatterPoint> out;
  for (const auto& row : rows) {
    out.push_back({std::stoull(row[0]), std::stoull(row[1]), std::stoull(row[2]),
                   {parse_double(row[3]), parse_double(row[4])}, std::stoull(row[5])});
  }
  return out;
}

std::string rootset_csv(const RootSet& roots) {
  std::string out = "re,im,multiplicity\n";
  for (std::size_t i = 0; i < roots.size(); ++i) {
    out += format_double(roots.points[i].real()) + "," + format_double(roots.points[i].imag()) + "," +
           std::to_string(roots.multiplicities[i]) + "\n";
  }
  return out;
}

RootSet rootset_from_csv(const std::string& csv) {
  std::vector<std::string> header;
  const auto rows = read_rows(csv, header);
  if (header != std::vector<std::string>{"re", "im", "multiplicity"}) {
    throw ValidationError("csv", "expected columns re,im,multiplicity");
  }
  RootSet roots;
  for (const auto& row : rows) {
    roots.points.emplace_back(parse_double(row[0]), parse_double(row[1]));
    roots.multiplicities.push_back(std::stoull(row[2]));
  }
  validate(roots);
  return roots;
}

Json audit_record(const JensenAudit& audit, const MobiusMap& u, std::size_t n, std::size_t k,
                  std::uint64_t seed) {
  return {{"lhs", audit.lhs},
          {"rhs", audit.rhs},
          {"slack", audit.slack},
          {"u",
           {u.alpha.real(), u.alpha.imag(), u.beta.real(), u.beta.imag(), u.gamma.real(), u.gamma.imag(),
            u.delta.real(), u.delta.imag()}},
          {"n", n},
          {"k", k},
          {"seed", seed}};
}

}  // namespace derivroots
