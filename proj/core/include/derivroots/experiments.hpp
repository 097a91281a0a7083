#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "derivroots/measures.hpp"
#include "derivroots/metrics.hpp"
#include "derivroots/precision.hpp"
#include "derivroots/report.hpp"
#include "derivroots/rootfind.hpp"

namespace derivroots {

// k as a function of n: fixed m = c, floor(c n / log n), floor(c n),
// floor(c sqrt n), floor(c n / (log n)^2).
enum class KRuleKind { fixed, n_over_log, linear, sqrt, n_over_log_squared };

std::string to_string(KRuleKind kind);
KRuleKind parse_k_rule(const std::string& name);

struct KRule {
  KRuleKind kind = KRuleKind::fixed;
  double c = 1.0;

  std::size_t operator()(std::size_t n) const;
};

struct ExperimentConfig {
  MeasureSpec measure;
  std::vector<std::size_t> n_grid;
  KRule k_rule;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double epsilon = 1.0;     // small-ball exponent
  Complex eval_point{};     // the point a in S_{k,n}(a)
  DerivativeMethod method = DerivativeMethod::ratio;
  std::size_t reference_size = 0;  // 0: n
  std::size_t mobius_maps = 10;
  double hull_tolerance = 1e-7;
  // Jensen audits cycle through these orders when nonempty.
  std::vector<std::size_t> k_values;
  std::size_t grid_points = 4096;
  // Run one trial per n with this trial seed instead of the full grid.
  std::optional<std::uint64_t> replay_seed;
  unsigned threads = 1;  // 0: default_thread_count()
};

// Field-named ValidationError on failure. Every derived k must satisfy
// 1 <= k < n.
void validate(const ExperimentConfig& cfg);

// Seed of trial `trial` at size n. Every random stream in that trial is
// derive_seed(trial_seed, role) with roles "roots", "reference", "solver",
// "noise", "split", "mobius".
std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t trial);

// Zeros of P^(k) against a reference sample of the measure (the exact atoms
// for a Discrete measure). Metrics: w1, logminus_gap_max,
// logminus_gap_mean over mobius_maps fixed maps, zero_count, degree_ok,
// hull_max_distance, hull_ok and, for Discrete measures, atom_violations.
TrialReport run_convergence(const ExperimentConfig& cfg);

// Frequency of log|S_{k,n}(a)| <= -epsilon n with Wilson intervals and
// quantiles of (1/n) log|S_{k,n}(a)| per n.
TrialReport run_anticoncentration(const ExperimentConfig& cfg);

// Monte Carlo mean and variance of S_{k,n}(a) against the generic-measure
// predictions. Throws GenericMeasureError when |g(a)| < 1e-9.
TrialReport run_moments(const ExperimentConfig& cfg);

// Random Moebius maps against random configurations; records the audit
// terms and the map coefficients.
TrialReport run_jensen(const ExperimentConfig& cfg);

struct CounterexampleResult {
  double q = 0.0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double p_exact = 0.0;
  double p_hat = 0.0;       // frequency of all m products vanishing
  double se = 0.0;          // binomial standard error at p_exact
  double deviation_se = 0.0;
  Interval p_hat_interval;  // Wilson
  double p_sum_zero = 0.0;  // frequency of S = 0, cancellations included
  Interval p_sum_zero_interval;
};

// m = ceil((1-q)^{-k}); throws ScaleError above 1e6.
std::size_t counterexample_m(double q, std::size_t k);
double counterexample_p_exact(double q, std::size_t k);

// S = sum_{i<=m} prod_{j<=k} Y_ij with P(Y=0) = q, P(Y=+1) = P(Y=-1) = (1-q)/2.
CounterexampleResult run_counterexample(double q, std::size_t k, std::size_t trials,
                                        std::uint64_t seed, unsigned threads = 1);

// log C(n, k) from the product formula.
double log_binomial(std::size_t n, std::size_t k);
// log N_r with N_r = C(n, r) C(n-r, k-r)^2.
double log_n_r(std::size_t n, std::size_t k, std::size_t r);

struct MomentPrediction {
  Complex mean;             // c^k C(n, k)
  double log_abs_mean = 0.0;
  double variance = 0.0;    // sum_{r>=1} N_r sigma^{2r} |c|^{2k-2r}
  double relative_variance = 0.0;  // variance / |mean|^2
  double first_order_ratio = 0.0;  // k^2 sigma^2 / (n |c|^2)
};

MomentPrediction predict_moments(Complex c, double sigma2, std::size_t n, std::size_t k);

// C q alpha^{1/k} / M^{1/q}.
double cw_bound(double alpha, std::size_t k, double moment_estimate, double q_param, double C);
// The same in logs, for alpha or M outside double range.
double log_cw_bound(double log_alpha, std::size_t k, double log_moment, double q_param, double C);

// alpha(n) = c n^{-exponent}; exponent 0 gives a constant.
struct AlphaRule {
  double c = 0.0;
  double exponent = 0.0;

  double operator()(std::size_t n) const;
};

struct PerturbationConfig {
  MeasureSpec mu;
  MeasureSpec nu;
  AlphaRule alpha;
  KRule k_rule;
  std::vector<std::size_t> n_grid;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  // Exactly round(alpha n) roots from nu (the last ones) instead of
  // independent Bernoulli(alpha) labels.
  bool deterministic_split = false;
  double chernoff_delta = 0.25;
  DerivativeMethod method = DerivativeMethod::ratio;
  std::size_t reference_size = 0;
  double hull_tolerance = 1e-7;
  std::optional<std::uint64_t> replay_seed;
  unsigned threads = 1;
};

void validate(const PerturbationConfig& cfg);

struct ScatterPoint {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t order = 0;  // 0: roots of P
  Complex z;
  std::size_t multiplicity = 1;
};

struct PerturbationResult {
  TrialReport report;
  std::vector<std::size_t> orders;  // layer orders, ascending
  std::vector<ScatterPoint> scatter;
};

// Roots from (1 - alpha_n) mu + alpha_n nu; zeros of P' and P^(k). With
// alpha = 0 every trial reproduces run_convergence on mu with the same seed.
PerturbationResult run_perturbation(const PerturbationConfig& cfg);

struct FrostmanConfig {
  MeasureSpec measure;
  std::size_t sample_size = 100000;
  std::vector<Complex> probes;  // sampled from the measure when empty
  std::size_t probe_count = 10;
  std::vector<double> r_grid;   // strictly decreasing, in (0, 1)
  std::uint64_t seed = 0;
  double positive_threshold = 0.05;
};

void validate(const FrostmanConfig& cfg);

// Per probe: per-radius estimates log mass / log r, their minimum, and the
// least-squares slope of log mass against log r, flagged positive when the
// slope exceeds positive_threshold.
TrialReport run_frostman(const FrostmanConfig& cfg);

// Least-squares slope of log mass on log r over the entries with mass > 0.
double frostman_slope(const std::vector<FrostmanEstimate>& estimates);

}  // namespace derivroots
