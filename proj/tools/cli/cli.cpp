#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "derivroots/errors.hpp"
#include "derivroots/experiments.hpp"
#include "derivroots/parallel.hpp"
#include "derivroots/serialization.hpp"
#include "svg.hpp"

#ifndef DERIVROOTS_VERSION
#define DERIVROOTS_VERSION "0.0.0"
#endif

namespace derivroots::cli {

namespace fs = std::filesystem;

namespace {

// A config problem, reported with exit code 2.
struct ConfigError {
  std::string message;
};

struct Options {
  std::string config_path;
  std::string out_dir = "runs";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> replay;
  std::optional<std::size_t> replay_n;
  std::optional<double> q;
  std::optional<std::size_t> k;
  std::optional<std::size_t> trials;
  std::string experiment;  // validate only
};

const std::vector<std::string> kExtraKeys{"experiment", "style"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError{"cannot read config file '" + path + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct LoadedConfig {
  std::string path;
  std::string source;
  Json json;
};

LoadedConfig load_config(const std::string& path) {
  LoadedConfig c{path, read_file(path), {}};
  try {
    c.json = Json::parse(c.source);
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < c.source.size(); ++i) {
      if (c.source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError{path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON"};
  }
  if (!c.json.is_object()) throw ConfigError{path + ":1: expected a JSON object"};
  return c;
}

// Runs `parse`, turning validation errors into located diagnostics.
template <class F>
auto parse_config(const LoadedConfig& c, F&& parse) {
  try {
    return parse(c.json);
  } catch (const ValidationError& e) {
    const std::size_t line = locate_field(c.source, e.field());
    throw ConfigError{c.path + (line ? ":" + std::to_string(line) : std::string()) + ": " + e.what()};
  }
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  fs::path dir;
  Json manifest;
};

// Creates the run directory and writes the manifest before anything else.
Run start_run(const Options& o, const std::string& experiment, std::uint64_t seed) {
  std::string stamp = timestamp_utc();
  std::string compact;
  for (char ch : stamp) {
    if (ch != '-' && ch != ':') compact += ch;
  }
  Run run;
  run.dir = make_unique_directory(o.out_dir, experiment + "-" + compact + "-s" + std::to_string(seed));
  run.manifest = {{"config_path", o.config_path},
                  {"output_dir", run.dir.string()},
                  {"experiment", experiment},
                  {"seed", seed},
                  {"tool_version", DERIVROOTS_VERSION},
                  {"timestamp", stamp}};
  write_file(run.dir / "manifest.json", run.manifest.dump(2) + "\n");
  return run;
}

void write_report(const Run& run, const Json& config, const TrialReport& report) {
  Json j;
  j["manifest"] = run.manifest;
  j["config"] = config;
  j["report"] = to_json(report);
  write_file(run.dir / "report.json", j.dump(2) + "\n");
  write_file(run.dir / "records.csv", records_csv(report));
}

unsigned thread_count(const Options& o) { return o.threads.value_or(default_thread_count()); }

void print_aggregates(std::ostream& out, const TrialReport& report, const std::vector<std::string>& metrics) {
  for (const auto& a : report.aggregates) {
    if (std::find(metrics.begin(), metrics.end(), a.metric) == metrics.end()) continue;
    out << "n=" << a.n << " " << a.metric << ": median " << format_double(a.median) << " [q1 "
        << format_double(a.q1) << ", q3 " << format_double(a.q3) << "] over " << a.count << " trials\n";
  }
}

ExperimentConfig experiment_config(const Options& o, const LoadedConfig& c) {
  ExperimentConfig cfg = parse_config(c, [](const Json& j) { return experiment_config_from_json(j, kExtraKeys); });
  if (o.seed) cfg.seed = *o.seed;
  if (o.replay) {
    cfg.replay_seed = *o.replay;
    if (o.replay_n) cfg.n_grid = {*o.replay_n};
  }
  cfg.threads = thread_count(o);
  return cfg;
}

int cmd_experiment(const Options& o, const std::string& name, std::ostream& out) {
  const LoadedConfig c = load_config(o.config_path);
  ExperimentConfig cfg = experiment_config(o, c);
  const Run run = start_run(o, name, cfg.seed);
  TrialReport report;
  std::vector<std::string> headline;
  if (name == "convergence") {
    report = run_convergence(cfg);
    headline = {"w1", "hull_max_distance"};
  } else if (name == "anticonc") {
    report = run_anticoncentration(cfg);
    headline = {"normalized_log_abs_S"};
  } else if (name == "moments") {
    report = run_moments(cfg);
    headline = {"S_re"};
  } else {
    report = run_jensen(cfg);
    headline = {"slack"};
    Json audits = Json::array();
    for (const auto& r : report.records) {
      JensenAudit a;
      a.lhs = *r.metric("lhs");
      a.rhs = *r.metric("rhs");
      a.slack = *r.metric("slack");
      const MobiusMap u{{*r.metric("u_alpha_re"), *r.metric("u_alpha_im")},
                        {*r.metric("u_beta_re"), *r.metric("u_beta_im")},
                        {*r.metric("u_gamma_re"), *r.metric("u_gamma_im")},
                        {*r.metric("u_delta_re"), *r.metric("u_delta_im")}};
      audits.push_back(audit_record(a, u, r.n, r.k, r.seed));
    }
    write_file(run.dir / "audits.json", audits.dump(2) + "\n");
  }
  write_report(run, to_json(cfg), report);
  print_aggregates(out, report, headline);
  for (const auto& row : report.summary) {
    out << row.label << ":";
    for (const auto& [key, v] : row.values) out << " " << key << "=" << format_double(v);
    out << "\n";
  }
  out << "wrote " << run.dir.string() << "\n";
  return kExitOk;
}

int cmd_perturbation(const Options& o, std::ostream& out) {
  const LoadedConfig c = load_config(o.config_path);
  PerturbationConfig cfg =
      parse_config(c, [](const Json& j) { return perturbation_config_from_json(j, kExtraKeys); });
  const ScatterStyle style =
      parse_config(c, [](const Json& j) { return j.contains("style") ? style_from_json(j["style"]) : ScatterStyle{}; });
  if (o.seed) cfg.seed = *o.seed;
  if (o.replay) {
    cfg.replay_seed = *o.replay;
    if (o.replay_n) cfg.n_grid = {*o.replay_n};
  }
  cfg.threads = thread_count(o);
  const Run run = start_run(o, "perturbation", cfg.seed);
  const PerturbationResult result = run_perturbation(cfg);
  write_report(run, to_json(cfg), result.report);
  write_file(run.dir / "scatter.csv", scatter_csv(result.scatter));
  for (std::size_t n : cfg.n_grid) {
    std::vector<ScatterPoint> layer;
    for (const auto& p : result.scatter) {
      if (p.n == n) layer.push_back(p);
    }
    const fs::path svg = run.dir / ("scatter_n" + std::to_string(n) + ".svg");
    write_file(svg, render_scatter(layer, style));
    out << "figure " << svg.string() << "\n";
  }
  print_aggregates(out, result.report, {"w1", "nu_count", "hull_max_distance"});
  out << "wrote " << run.dir.string() << "\n";
  return kExitOk;
}

int cmd_frostman(const Options& o, std::ostream& out) {
  const LoadedConfig c = load_config(o.config_path);
  FrostmanConfig cfg = parse_config(c, [](const Json& j) { return frostman_config_from_json(j, kExtraKeys); });
  if (o.seed) cfg.seed = *o.seed;
  const Run run = start_run(o, "frostman", cfg.seed);
  const TrialReport report = run_frostman(cfg);
  write_report(run, to_json(cfg), report);
  for (const auto& row : report.summary) {
    out << row.label << ": slope " << format_double(*row.value("slope")) << ", min estimate "
        << format_double(*row.value("min_estimate")) << (*row.value("positive") == 1.0 ? " (positive)" : " (zero)")
        << "\n";
  }
  out << "wrote " << run.dir.string() << "\n";
  return kExitOk;
}

struct CounterexampleArgs {
  double q = 1.0 / 3.0;
  std::size_t k = 8;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
};

CounterexampleArgs counterexample_args(const Options& o) {
  CounterexampleArgs a;
  if (!o.config_path.empty()) {
    const LoadedConfig c = load_config(o.config_path);
    parse_config(c, [&](const Json& j) {
      for (const auto& [key, value] : j.items()) {
        if (key == "q") {
          if (!value.is_number()) throw ValidationError("q", "expected a number");
          a.q = value.get<double>();
        } else if (key == "k" || key == "trials" || key == "seed") {
          if (!value.is_number_unsigned()) throw ValidationError(key, "expected a nonnegative integer");
          const std::uint64_t v = value.get<std::uint64_t>();
          if (key == "k") {
            a.k = v;
          } else if (key == "trials") {
            a.trials = v;
          } else {
            a.seed = v;
          }
        } else if (key != "experiment") {
          throw ValidationError(key, "unknown field");
        }
      }
      return 0;
    });
  }
  if (o.q) a.q = *o.q;
  if (o.k) a.k = *o.k;
  if (o.trials) a.trials = *o.trials;
  if (o.seed) a.seed = *o.seed;
  try {
    if (!(a.q > 0.0 && a.q < 1.0)) throw ValidationError("q", "must lie in (0, 1)");
    if (a.k < 1) throw ValidationError("k", "must be at least 1");
    if (a.trials < 1) throw ValidationError("trials", "must be at least 1");
    counterexample_m(a.q, a.k);
  } catch (const ValidationError& e) {
    throw ConfigError{e.what()};
  } catch (const ScaleError& e) {
    throw ConfigError{e.what()};
  }
  return a;
}

int cmd_counterexample(const Options& o, std::ostream& out) {
  const CounterexampleArgs a = counterexample_args(o);
  const Run run = start_run(o, "counterexample", a.seed);
  const CounterexampleResult r = run_counterexample(a.q, a.k, a.trials, a.seed, thread_count(o));
  Json j = to_json(r);
  j["seed"] = a.seed;
  Json full;
  full["manifest"] = run.manifest;
  full["config"] = {{"q", a.q}, {"k", a.k}, {"trials", a.trials}, {"seed", a.seed}};
  full["result"] = j;
  write_file(run.dir / "report.json", full.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const LoadedConfig c = load_config(o.config_path);
  std::string kind = o.experiment;
  if (kind.empty() && c.json.contains("experiment") && c.json["experiment"].is_string()) {
    kind = c.json["experiment"].get<std::string>();
  }
  if (kind.empty()) {
    kind = c.json.contains("mu") ? "perturbation"
           : c.json.contains("r_grid") ? "frostman"
           : c.json.contains("q") ? "counterexample"
                                  : "convergence";
  }
  if (kind == "perturbation") {
    parse_config(c, [](const Json& j) { return perturbation_config_from_json(j, kExtraKeys); });
    parse_config(c, [](const Json& j) { return j.contains("style") ? style_from_json(j["style"]) : ScatterStyle{}; });
  } else if (kind == "frostman") {
    parse_config(c, [](const Json& j) { return frostman_config_from_json(j, kExtraKeys); });
  } else if (kind == "counterexample") {
    Options copy = o;
    counterexample_args(copy);
  } else if (kind == "convergence" || kind == "anticonc" || kind == "moments" || kind == "jensen") {
    parse_config(c, [](const Json& j) { return experiment_config_from_json(j, kExtraKeys); });
  } else {
    throw ConfigError{"unknown experiment kind '" + kind + "'"};
  }
  out << o.config_path << ": valid " << kind << " config\n";
  return kExitOk;
}

}  // namespace

std::size_t locate_field(const std::string& source, const std::string& path) {
  if (path.empty()) return 0;
  std::vector<std::string> keys;
  std::istringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    part = part.substr(0, part.find('['));
    if (!part.empty()) keys.push_back(part);
  }
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  for (const auto& key : keys) {
    const std::size_t at = source.find("\"" + key + "\"", pos);
    if (at == std::string::npos) break;
    found = at;
    pos = at + key.size() + 2;
  }
  if (found == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

fs::path make_unique_directory(const fs::path& base, const std::string& name) {
  fs::create_directories(base);
  for (int attempt = 1;; ++attempt) {
    const fs::path dir = base / (attempt == 1 ? name : name + "-" + std::to_string(attempt));
    if (fs::create_directory(dir)) return dir;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeros of high-order derivatives of random polynomials", "derivroots"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DERIVROOTS_VERSION);
  Options o;

  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config_path, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--out", o.out_dir, "base directory for run outputs")->capture_default_str();
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--threads", o.threads, "worker threads (default: DERIVROOTS_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };
  const auto replayable = [&](CLI::App* sub) {
    sub->add_option("--replay", o.replay, "rerun the single trial with this seed");
    sub->add_option("--n", o.replay_n, "with --replay: the n of the trial");
  };

  auto* convergence = app.add_subcommand("convergence", "W1 and log-potential convergence of derivative zeros");
  common(convergence, true);
  replayable(convergence);
  auto* anticonc = app.add_subcommand("anticonc", "small-ball frequency of S_{k,n}(a)");
  common(anticonc, true);
  replayable(anticonc);
  auto* moments = app.add_subcommand("moments", "Monte Carlo moments of S_{k,n}(a) against predictions");
  common(moments, true);
  replayable(moments);
  auto* jensen = app.add_subcommand("jensen", "Jensen inequality audits under random Moebius maps");
  common(jensen, true);
  replayable(jensen);
  auto* perturbation = app.add_subcommand("perturbation", "perturbed root laws, scatter layers and SVG");
  common(perturbation, true);
  replayable(perturbation);
  auto* frostman = app.add_subcommand("frostman", "empirical local dimension at probe points");
  common(frostman, true);
  auto* counterexample = app.add_subcommand("counterexample", "vanishing probability of the sum of products");
  common(counterexample, false);
  counterexample->add_option("--q", o.q, "P(Y = 0)");
  counterexample->add_option("--k", o.k, "factors per product");
  counterexample->add_option("--trials", o.trials, "Monte Carlo trials");
  auto* validate_cmd = app.add_subcommand("validate", "check a config file without running it");
  validate_cmd->add_option("--config", o.config_path, "JSON config file")->required();
  validate_cmd->add_option("--experiment", o.experiment, "config kind (default: inferred)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate_cmd) return cmd_validate(o, out);
    if (*counterexample) return cmd_counterexample(o, out);
    if (*perturbation) return cmd_perturbation(o, out);
    if (*frostman) return cmd_frostman(o, out);
    for (auto* sub : {convergence, anticonc, moments, jensen}) {
      if (*sub) return cmd_experiment(o, sub->get_name(), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.message << "\n";
    return kExitConfig;
  } catch (const TrialError& e) {
    err << "error: " << e.what() << "\n"
        << "replay with: --replay " << e.seed() << " --n " << e.n() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace derivroots::cli
