// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "derivroots/experiments.hpp"
#include "derivroots/measures.hpp"
#include "derivroots/nummelin.hpp"
#include "derivroots/parallel.hpp"
#include "derivroots/serialization.hpp"
#include "derivroots/sympoly.hpp"
#include "oracles.hpp"
#include "svg.hpp"

using namespace derivroots;
namespace fs = std::filesystem;

namespace {

constexpr double kOracleTol = 1e-9;
constexpr double kCounterSigmas = 4.0;
constexpr double kCounterLimitTol = 0.02;
constexpr double kJensenTol = 1e-6;
constexpr double kHullTol = 1e-7;
constexpr double kMomentSigmas = 4.0;
constexpr double kRatioIdentityTol = 1e-12;
constexpr double kCantorTol = 0.1;
constexpr double kDiskTol = 0.1;
constexpr double kAtomTol = 0.01;
constexpr double kDominationSigmas = 3.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Largest hull distance seen by the convergence and perturbation runs.
double g_hull_max = -INFINITY;
std::size_t g_hull_runs = 0;
std::size_t g_hull_failures = 0;

void note_hull(const TrialReport& r) {
  for (const auto& rec : r.records) {
    g_hull_max = std::max(g_hull_max, *rec.metric("hull_max_distance"));
    g_hull_failures += *rec.metric("hull_ok") != 1.0;
    ++g_hull_runs;
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

unsigned threads() { return default_thread_count(); }

Outcome oracle_equivalence() {
  CounterRng rng(derive_seed(1, "acceptance-oracle"));
  double worst = 0.0;
  for (std::uint64_t c = 0; c < 500; ++c) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 50);
    const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(rng.uniform() * 11));
    const auto roots = sample(make_disk(0.0, 2.0), n, derive_seed(1, "acceptance-roots", {c}));
    Complex z;
    for (;;) {
      z = std::polar(3.0 * std::sqrt(rng.uniform()), 2 * std::numbers::pi * rng.uniform());
      if (std::all_of(roots.begin(), roots.end(), [&](Complex r) { return std::abs(z - r) > 1e-3; })) break;
    }
    const double got = log_abs_S(roots, z, k);
    const double ref = oracle::log_S_by_coefficients(roots, z, k).first;
    worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
  }
  return {worst <= kOracleTol, "500 configs, worst relative error " + fmt(worst) + " (tol " + fmt(kOracleTol) + ")"};
}

Outcome counterexample() {
  const CounterexampleResult r = run_counterexample(1.0 / 3.0, 8, 100000, 2024, threads());
  std::string curve;
  for (std::size_t k = 4; k <= 12; ++k) curve += (k > 4 ? "," : "") + fmt(counterexample_p_exact(1.0 / 3.0, k));
  const double p12 = counterexample_p_exact(1.0 / 3.0, 12);
  const bool ok = std::abs(r.deviation_se) <= kCounterSigmas && std::abs(p12 - std::exp(-1.0)) <= kCounterLimitTol;
  return {ok, "p_hat " + fmt(r.p_hat) + " vs p_exact " + fmt(r.p_exact) + " (" + fmt(r.deviation_se) +
                  " se, tol 4); p_exact k=4..12: " + curve + "; |p_exact(12) - 1/e| = " +
                  fmt(std::abs(p12 - std::exp(-1.0))) + " (tol 0.02)"};
}

Outcome discrete_multiplicity() {
  ExperimentConfig cfg;
  cfg.measure = make_discrete({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3});
  cfg.n_grid = {600};
  cfg.k_rule = {KRuleKind::fixed, 30};
  cfg.trials = 20;
  cfg.seed = 3;
  cfg.threads = threads();
  const TrialReport r = run_convergence(cfg);
  note_hull(r);
  std::size_t bad = 0;
  for (const auto& rec : r.records) {
    bad += *rec.metric("atom_violations") != 0.0 || *rec.metric("zero_count") != 570.0;
  }
  return {bad == 0 && r.records.size() == 20,
          std::to_string(r.records.size()) + " trials, " + std::to_string(bad) + " with a multiplicity or count mismatch"};
}

Outcome convergence_trend() {
  ExperimentConfig cfg;
  cfg.measure = make_circle(0.0, 1.0);
  cfg.n_grid = {100, 400, 1600};
  cfg.k_rule = {KRuleKind::n_over_log_squared, 1.0};
  cfg.trials = 20;
  cfg.seed = 4;
  cfg.threads = threads();
  const TrialReport r = run_convergence(cfg);
  note_hull(r);
  std::vector<double> medians;
  std::string text;
  for (std::size_t n : cfg.n_grid) {
    medians.push_back(r.aggregate(n, "w1")->median);
    text += (text.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " (k=" +
            std::to_string(cfg.k_rule(n)) + ") " + fmt(medians.back());
  }
  const bool ok = medians[1] < medians[0] && medians[2] < medians[1];
  return {ok, "median W1: " + text};
}

Outcome jensen() {
  ExperimentConfig cfg;
  cfg.measure = make_disk(0.0, 1.0);
  cfg.n_grid = {50};
  cfg.k_values = {1, 3, 5};
  cfg.trials = 100;
  cfg.seed = 5;
  cfg.threads = threads();
  const TrialReport r = run_jensen(cfg);
  double worst = INFINITY;
  for (const auto& rec : r.records) worst = std::min(worst, *rec.metric("slack"));
  return {worst >= -kJensenTol && r.records.size() == 100,
          "100 pairs, min slack " + fmt(worst) + " (tol -1e-06)"};
}

Outcome moments() {
  ExperimentConfig cfg;
  cfg.measure = make_circle(0.0, 1.0);
  cfg.eval_point = 2.0;
  cfg.n_grid = {100};
  cfg.k_rule = {KRuleKind::fixed, 3};
  cfg.trials = 10000;
  cfg.seed = 7;
  cfg.threads = threads();
  const TrialReport r = run_moments(cfg);
  const SummaryRow& row = *r.summary_row("n=100");
  const double predicted = std::pow(0.5, 3) * 161700.0;
  const double mean = *row.value("mc_mean_re"), se = *row.value("mc_se_re");
  const double z = (mean - predicted) / se;
  const double identity = *row.value("ratio_identity_rel_error");
  const bool ok = std::abs(*row.value("c_re") - 0.5) <= 1e-12 && std::abs(z) <= kMomentSigmas &&
                  identity <= kRatioIdentityTol && std::abs(*row.value("predicted_mean_re") - predicted) <= 1e-9 * predicted;
  return {ok, "mean " + fmt(mean) + " vs " + fmt(predicted) + " (" + fmt(z) + " se, tol 4); ratio identity error " +
                  fmt(identity) + " (tol 1e-12)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

Outcome figure_one() {
  PerturbationConfig cfg;
  cfg.mu = make_circle(0.0, 1.0);
  cfg.nu = make_disk(3.0, 0.1);
  cfg.alpha = {1.0 / 11.0, 0.0};
  cfg.deterministic_split = true;
  cfg.k_rule = {KRuleKind::fixed, 5};
  cfg.n_grid = {110};
  cfg.trials = 10;
  cfg.seed = 1;
  cfg.threads = threads();
  const PerturbationResult r = run_perturbation(cfg);
  note_hull(r.report);
  std::size_t bad = 0;
  for (const auto& rec : r.report.records) {
    bad += *rec.metric("zero_count") != 105.0 || *rec.metric("nu_count") != 10.0 ||
           *rec.metric("first_order_count") != 109.0;
  }

  // The same configuration through the command line, twice.
  const fs::path base = fs::temp_directory_path() / "derivroots-acceptance-fig1";
  fs::remove_all(base);
  fs::create_directories(base);
  std::ofstream(base / "fig1.json") << to_json(cfg).dump(2);
  std::vector<std::string> svgs;
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out, err;
    const fs::path dir = base / ("run" + std::to_string(i));
    const int code = cli::run({"perturbation", "--config", (base / "fig1.json").string(), "--out", dir.string()}, out, err);
    if (code != cli::kExitOk) return {false, "CLI exited with " + std::to_string(code) + ": " + err.str()};
    for (const auto& e : fs::directory_iterator(dir)) svgs.push_back(slurp(e.path() / "scatter_n110.svg"));
  }
  const std::size_t legend = count(svgs[0], "class=\"legend-entry\"");
  const std::size_t markers = count(svgs[0], "class=\"marker\"");
  const bool ok = bad == 0 && legend == 3 && svgs[0] == svgs[1] && !svgs[0].empty() &&
                  svgs[0] == cli::render_scatter(r.scatter, cli::ScatterStyle{});
  return {ok, "10 trials, " + std::to_string(bad) + " degree mismatches; SVG with " + std::to_string(legend) +
                  " layers, " + std::to_string(markers) + " markers, rerun " +
                  (svgs[0] == svgs[1] ? "byte-identical" : "DIFFERENT")};
}

Outcome gauss_lucas() {
  return {g_hull_failures == 0 && g_hull_max <= kHullTol && g_hull_runs > 0,
          std::to_string(g_hull_runs) + " trials from criteria 3, 4 and 8, max signed hull distance " + fmt(g_hull_max) +
              " (tol 1e-07)"};
}

Outcome frostman() {
  FrostmanConfig cantor;
  cantor.measure = make_cantor(0.0, 1.0, 1.0 / 3.0);
  cantor.sample_size = 1000000;
  cantor.probe_count = 10;
  for (int j = 2; j <= 8; ++j) cantor.r_grid.push_back(std::pow(3.0, -j));
  cantor.seed = 9;
  const double target = std::log(2.0) / std::log(3.0);
  double cantor_worst = 0.0;
  for (const auto& rec : run_frostman(cantor).records) {
    cantor_worst = std::max(cantor_worst, std::abs(*rec.metric("slope") - target));
  }

  FrostmanConfig disk;
  disk.measure = make_disk(0.0, 1.0);
  disk.sample_size = 1000000;
  disk.probes = {0.0, {0.3, 0.0}, {-0.2, 0.4}, {0.1, -0.5}, {-0.6, -0.1}};
  disk.r_grid = {0.3, 0.2, 0.1, 0.05, 0.03};
  disk.seed = 10;
  double disk_worst = 0.0;
  for (const auto& rec : run_frostman(disk).records) {
    disk_worst = std::max(disk_worst, std::abs(*rec.metric("slope") - 2.0));
  }

  FrostmanConfig atoms;
  atoms.measure = make_discrete({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3});
  atoms.sample_size = 100000;
  atoms.probes = {-1.0, 0.0, 1.0};
  atoms.r_grid = {0.5, 0.1, 0.01, 0.001};
  atoms.seed = 11;
  double atom_worst = 0.0;
  for (const auto& rec : run_frostman(atoms).records) {
    atom_worst = std::max(atom_worst, std::abs(*rec.metric("slope")));
  }
  const bool ok = cantor_worst <= kCantorTol && disk_worst <= kDiskTol && atom_worst <= kAtomTol;
  return {ok, "max |slope - target|: cantor " + fmt(cantor_worst) + " (tol 0.1), disk " + fmt(disk_worst) +
                  " (tol 0.1), atoms " + fmt(atom_worst) + " (tol 0.01)"};
}

Outcome nummelin() {
  const DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, 2.0);
  const PointSampler y = reciprocal_sampler(make_disk(0.0, 1.0), 2.0);
  std::vector<Complex> samples(1000000);
  const std::uint64_t seed = derive_seed(12, "acceptance-nummelin");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CounterRng rng(stream_key(seed, i));
    samples[i] = y(rng);
  }
  const DominationCheck c = check_domination(p, samples, 50, kDominationSigmas);
  const bool ok = c.passed && p.c_a > 0.0 && p.c_a <= 1.0;
  return {ok, "c_a " + fmt(p.c_a) + ", " + std::to_string(c.cells_checked) + " cells, " +
                  std::to_string(c.violations) + " below 3 se, min z " + fmt(c.min_z_score)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Criterion 6 reads the hull distances collected by 3, 4 and 8, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "symmetric-function oracle equivalence", oracle_equivalence},
      {2, "counterexample probability", counterexample},
      {3, "discrete multiplicity identity", discrete_multiplicity},
      {4, "convergence trend", convergence_trend},
      {5, "Jensen audit", jensen},
      {7, "moment prediction", moments},
      {8, "perturbation scatter reproduction", figure_one},
      {9, "Frostman exponents", frostman},
      {10, "Nummelin domination", nummelin},
      {6, "Gauss-Lucas invariant", gauss_lucas},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%s s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                fmt(secs).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
