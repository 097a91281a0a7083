#include "derivroots/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "derivroots/errors.hpp"
#include "derivroots/parallel.hpp"
#include "derivroots/rng.hpp"
#include "derivroots/sympoly.hpp"

namespace derivroots {

std::string to_string(KRuleKind kind) {
  switch (kind) {
    case KRuleKind::fixed: return "fixed";
    case KRuleKind::n_over_log: return "n_over_log";
    case KRuleKind::linear: return "linear";
    case KRuleKind::sqrt: return "sqrt";
    case KRuleKind::n_over_log_squared: return "n_over_log_squared";
  }
  return "fixed";
}

KRuleKind parse_k_rule(const std::string& name) {
  for (KRuleKind kind : {KRuleKind::fixed, KRuleKind::n_over_log, KRuleKind::linear,
                         KRuleKind::sqrt, KRuleKind::n_over_log_squared}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("k_rule.kind", "unknown k rule '" + name + "'");
}

std::size_t KRule::operator()(std::size_t n) const {
  const double x = static_cast<double>(n);
  double k = 0.0;
  switch (kind) {
    case KRuleKind::fixed: return static_cast<std::size_t>(std::llround(std::max(c, 0.0)));
    case KRuleKind::n_over_log: k = c * x / std::log(x); break;
    case KRuleKind::linear: k = c * x; break;
    case KRuleKind::sqrt: k = c * std::sqrt(x); break;
    case KRuleKind::n_over_log_squared: k = c * x / (std::log(x) * std::log(x)); break;
  }
  if (!(k > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(k + 1e-9));
}

namespace {

void validate_grid(const std::vector<std::size_t>& n_grid, const KRule& rule, std::size_t trials) {
  if (n_grid.empty()) throw ValidationError("n_grid", "must be nonempty");
  if (!(rule.c > 0.0)) throw ValidationError("k_rule.c", "must be positive");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const std::size_t n = n_grid[i];
    const std::size_t k = rule(n);
    if (n < 2 || k < 1 || k >= n) {
      throw ValidationError("n_grid[" + std::to_string(i) + "]",
                            "k_rule gives k = " + std::to_string(k) + " at n = " +
                                std::to_string(n) + "; need 1 <= k < n");
    }
  }
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
}

unsigned resolve_threads(unsigned threads) { return threads == 0 ? default_thread_count() : threads; }

struct TrialOutput {
  std::size_t k = 0;
  MetricList metrics;
  std::vector<ScatterPoint> scatter;
};

struct Task {
  std::size_t n;
  std::size_t trial;
  std::uint64_t seed;
};

std::vector<Task> make_tasks(const std::vector<std::size_t>& n_grid, std::size_t trials,
                             std::uint64_t seed, const std::optional<std::uint64_t>& replay) {
  std::vector<Task> tasks;
  for (std::size_t n : n_grid) {
    if (replay) {
      tasks.push_back({n, 0, *replay});
      continue;
    }
    for (std::size_t t = 0; t < trials; ++t) tasks.push_back({n, t, trial_seed(seed, n, t)});
  }
  return tasks;
}

// Runs every task, wrapping failures in TrialError, and returns the
// records and scatter points in task order.
template <class F>
TrialReport run_tasks(const std::string& name, const std::vector<Task>& tasks, unsigned threads,
                      F&& body, std::vector<ScatterPoint>* scatter = nullptr) {
  std::vector<TrialRecord> records(tasks.size());
  std::vector<std::vector<ScatterPoint>> layers(tasks.size());
  parallel_for(tasks.size(), resolve_threads(threads), [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto start = std::chrono::steady_clock::now();
    TrialOutput out;
    try {
      out = body(task);
    } catch (const TrialError&) {
      throw;
    } catch (const std::exception& e) {
      throw TrialError(name + " trial " + std::to_string(task.trial) + " at n = " +
                           std::to_string(task.n) + " failed (seed " + std::to_string(task.seed) +
                           "): " + e.what(),
                       task.seed, task.n, task.trial);
    }
    TrialRecord& r = records[i];
    r.n = task.n;
    r.trial = task.trial;
    r.seed = task.seed;
    r.k = out.k;
    r.metrics = std::move(out.metrics);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    layers[i] = std::move(out.scatter);
  });
  TrialReport report;
  report.experiment = name;
  report.records = std::move(records);
  report.aggregates = aggregate_records(report.records);
  if (scatter) {
    for (auto& l : layers) scatter->insert(scatter->end(), l.begin(), l.end());
  }
  return report;
}

// Reference measure: the exact atoms of a Discrete law, otherwise an
// independent sample.
EmpiricalMeasure reference_measure(const MeasureSpec& spec, std::size_t size, std::uint64_t seed) {
  if (const auto* d = std::get_if<Discrete>(&spec.law)) return {d->atoms, d->weights};
  return EmpiricalMeasure::uniform(sample(spec, size, seed));
}

std::vector<MobiusMap> fixed_maps(std::uint64_t seed, std::size_t count) {
  std::vector<MobiusMap> maps;
  for (std::size_t i = 0; i < count; ++i) maps.push_back(sample_mobius(derive_seed(seed, "mobius", {i})));
  return maps;
}

std::size_t multiplicity_of(const RootSet& set, Complex z) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.points[i] == z) return set.multiplicities[i];
  }
  return 0;
}

// Counts atoms of `parent` whose multiplicity among `zeros` differs from
// max(N - k, 0).
double atom_violations(const RootSet& parent, const RootSet& zeros, std::size_t k) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const std::size_t expected = parent.multiplicities[i] > k ? parent.multiplicities[i] - k : 0;
    if (multiplicity_of(zeros, parent.points[i]) != expected) ++bad;
  }
  return static_cast<double>(bad);
}

// Samples n roots avoiding the evaluation point; returns the roots and the
// number of redraws.
std::pair<std::vector<Complex>, std::size_t> roots_avoiding(const MeasureSpec& spec, std::size_t n,
                                                            std::uint64_t seed, Complex a) {
  for (std::size_t attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t s = attempt == 0 ? derive_seed(seed, "roots") : derive_seed(seed, "roots", {attempt});
    std::vector<Complex> roots = sample(spec, n, s);
    if (std::find(roots.begin(), roots.end(), a) == roots.end()) return {std::move(roots), attempt};
  }
  throw PoleError(a, "evaluation point is a sampled root in 100 consecutive draws");
}

double bool_metric(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t trial) {
  return derive_seed(seed, "trial", {n, trial});
}

void validate(const ExperimentConfig& cfg) {
  try {
    validate(cfg.measure);
  } catch (const ValidationError& e) {
    throw ValidationError("measure." + e.field(), e.what());
  }
  if (cfg.k_values.empty()) {
    validate_grid(cfg.n_grid, cfg.k_rule, cfg.trials);
  } else {
    if (cfg.n_grid.empty()) throw ValidationError("n_grid", "must be nonempty");
    if (cfg.trials < 1) throw ValidationError("trials", "must be at least 1");
    for (std::size_t i = 0; i < cfg.k_values.size(); ++i) {
      for (std::size_t n : cfg.n_grid) {
        if (cfg.k_values[i] < 1 || cfg.k_values[i] >= n) {
          throw ValidationError("k_values[" + std::to_string(i) + "]", "need 1 <= k < n for every n");
        }
      }
    }
  }
  if (!(cfg.epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  if (!(cfg.hull_tolerance >= 0.0)) throw ValidationError("hull_tolerance", "must be nonnegative");
  if (cfg.grid_points < 8) throw ValidationError("grid_points", "must be at least 8");
}

TrialReport run_convergence(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<MobiusMap> maps = fixed_maps(cfg.seed, cfg.mobius_maps);
  const bool discrete = std::holds_alternative<Discrete>(cfg.measure.law);
  return run_tasks("convergence", make_tasks(cfg.n_grid, cfg.trials, cfg.seed, cfg.replay_seed),
                   cfg.threads, [&](const Task& task) {
    const std::size_t n = task.n, k = cfg.k_rule(n);
    const RootSet roots = RootSet::from_samples(sample(cfg.measure, n, derive_seed(task.seed, "roots")));
    const RootSet zeros = derivative_roots(roots, k, cfg.method, derive_seed(task.seed, "solver"));
    const EmpiricalMeasure reference = reference_measure(
        cfg.measure, cfg.reference_size ? cfg.reference_size : n, derive_seed(task.seed, "reference"));
    const EmpiricalMeasure empirical = EmpiricalMeasure::from_roots(zeros);
    const HullCheck hull = gauss_lucas_check(roots, zeros, cfg.hull_tolerance);

    double gap_max = 0.0, gap_sum = 0.0;
    for (const MobiusMap& u : maps) {
      const double gap = std::abs(logminus_potential(empirical, u) - logminus_potential(reference, u));
      gap_max = std::max(gap_max, gap);
      gap_sum += gap;
    }
    TrialOutput out;
    out.k = k;
    out.metrics = {
        {"w1", w1_distance(empirical, reference)},
        {"logminus_gap_max", gap_max},
        {"logminus_gap_mean", maps.empty() ? 0.0 : gap_sum / static_cast<double>(maps.size())},
        {"zero_count", static_cast<double>(zeros.degree())},
        {"degree_ok", bool_metric(zeros.degree() == n - k)},
        {"hull_max_distance", hull.max_distance},
        {"hull_ok", bool_metric(hull.ok)},
    };
    if (discrete) out.metrics.emplace_back("atom_violations", atom_violations(roots, zeros, k));
    return out;
  });
}

TrialReport run_anticoncentration(const ExperimentConfig& cfg) {
  validate(cfg);
  TrialReport report = run_tasks(
      "anticoncentration", make_tasks(cfg.n_grid, cfg.trials, cfg.seed, cfg.replay_seed), cfg.threads,
      [&](const Task& task) {
        const std::size_t n = task.n, k = cfg.k_rule(n);
        const auto [roots, redraws] = roots_avoiding(cfg.measure, n, task.seed, cfg.eval_point);
        const double log_abs = log_abs_S(roots, cfg.eval_point, k);
        const double threshold = -cfg.epsilon * static_cast<double>(n);
        TrialOutput out;
        out.k = k;
        out.metrics = {
            {"log_abs_S", log_abs},
            {"normalized_log_abs_S", log_abs / static_cast<double>(n)},
            {"small_ball", bool_metric(log_abs <= threshold)},
            {"resamples", static_cast<double>(redraws)},
        };
        return out;
      });

  for (std::size_t n : cfg.n_grid) {
    const auto records = report.records_for(n);
    std::size_t events = 0, redraws = 0;
    std::vector<double> normalized;
    for (const TrialRecord* r : records) {
      if (*r->metric("small_ball") == 1.0) ++events;
      redraws += static_cast<std::size_t>(*r->metric("resamples"));
      normalized.push_back(*r->metric("normalized_log_abs_S"));
    }
    std::sort(normalized.begin(), normalized.end());
    const Interval ci = wilson_interval(events, records.size());
    const std::size_t k = cfg.k_rule(n);
    SummaryRow row{"n=" + std::to_string(n), {}};
    row.values = {
        {"n", static_cast<double>(n)},
        {"k", static_cast<double>(k)},
        {"trials", static_cast<double>(records.size())},
        {"events", static_cast<double>(events)},
        {"frequency", static_cast<double>(events) / static_cast<double>(records.size())},
        {"wilson_low", ci.low},
        {"wilson_high", ci.high},
        {"resamples", static_cast<double>(redraws)},
        {"q01", quantile_sorted(normalized, 0.01)},
        {"q05", quantile_sorted(normalized, 0.05)},
        {"q25", quantile_sorted(normalized, 0.25)},
        {"q50", quantile_sorted(normalized, 0.50)},
        {"q75", quantile_sorted(normalized, 0.75)},
        {"q95", quantile_sorted(normalized, 0.95)},
        {"q99", quantile_sorted(normalized, 0.99)},
        // Carbery-Wright right side with q = 2k, alpha = e^{-epsilon n},
        // moment C(n, k), unit constant.
        {"log_cw_bound", log_cw_bound(-cfg.epsilon * static_cast<double>(n), k, log_binomial(n, k),
                                      2.0 * static_cast<double>(k), 1.0)},
    };
    report.summary.push_back(std::move(row));
  }
  return report;
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  k = std::min(k, n - k);
  double total = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    total += std::log(static_cast<double>(n - k + i) / static_cast<double>(i));
  }
  return total;
}

double log_n_r(std::size_t n, std::size_t k, std::size_t r) {
  return log_binomial(n, r) + 2.0 * log_binomial(n - r, k - r);
}

MomentPrediction predict_moments(Complex c, double sigma2, std::size_t n, std::size_t k) {
  if (k > n) throw ValidationError("k", "must not exceed n");
  MomentPrediction p;
  if (k == 0) {
    p.mean = Complex{1.0, 0.0};
    return p;
  }
  const double abs_c = std::abs(c);
  const double log_abs_c = std::log(abs_c);
  p.log_abs_mean = static_cast<double>(k) * log_abs_c + log_binomial(n, k);
  p.mean = std::polar(std::exp(p.log_abs_mean), static_cast<double>(k) * std::arg(c));
  // Var S / |E S|^2 = sum_{r>=1} (N_r / N_0) (sigma^2 / |c|^2)^r.
  const double log_n0 = log_n_r(n, k, 0);
  const double log_q = std::log(sigma2) - 2.0 * log_abs_c;
  double relative = 0.0;
  if (sigma2 > 0.0) {
    for (std::size_t r = 1; r <= k; ++r) {
      relative += std::exp(log_n_r(n, k, r) - log_n0 + static_cast<double>(r) * log_q);
    }
  }
  p.relative_variance = relative;
  p.variance = relative * std::exp(2.0 * p.log_abs_mean);
  p.first_order_ratio = static_cast<double>(k * k) * sigma2 / (static_cast<double>(n) * abs_c * abs_c);
  return p;
}

TrialReport run_moments(const ExperimentConfig& cfg) {
  validate(cfg);
  const Complex a = cfg.eval_point;
  const Complex c = cauchy_transform(cfg.measure, a).value;
  if (std::abs(c) < 1e-9) {
    throw GenericMeasureError("g(a) = 0 within 1e-9; the mean of S_{k,n}(a) carries no signal");
  }
  const double second = inverse_square_moment(cfg.measure, a).value.real();
  if (!std::isfinite(second)) {
    throw DegenerateConfigurationError("E 1/|a - xi|^2 is infinite at the evaluation point");
  }
  const double sigma2 = std::max(0.0, second - std::norm(c));

  TrialReport report = run_tasks(
      "moments", make_tasks(cfg.n_grid, cfg.trials, cfg.seed, cfg.replay_seed), cfg.threads,
      [&](const Task& task) {
        const std::size_t n = task.n, k = cfg.k_rule(n);
        const auto [roots, redraws] = roots_avoiding(cfg.measure, n, task.seed, a);
        const Complex s = s_table(roots, a, k)[k].to_complex();
        TrialOutput out;
        out.k = k;
        out.metrics = {
            {"S_re", s.real()},
            {"S_im", s.imag()},
            {"abs_S", std::abs(s)},
            {"resamples", static_cast<double>(redraws)},
        };
        return out;
      });

  for (std::size_t n : cfg.n_grid) {
    const std::size_t k = cfg.k_rule(n);
    const MomentPrediction p = predict_moments(c, sigma2, n, k);
    const auto records = report.records_for(n);
    const double t = static_cast<double>(records.size());
    double sr = 0.0, si = 0.0;
    for (const TrialRecord* r : records) {
      sr += *r->metric("S_re");
      si += *r->metric("S_im");
    }
    const double mr = sr / t, mi = si / t;
    double vr = 0.0, vi = 0.0;
    for (const TrialRecord* r : records) {
      vr += std::pow(*r->metric("S_re") - mr, 2);
      vi += std::pow(*r->metric("S_im") - mi, 2);
    }
    const double denom = std::max(1.0, t - 1.0);
    vr /= denom;
    vi /= denom;
    const double se_r = std::sqrt(vr / t), se_i = std::sqrt(vi / t);

    // Ratio identity: N_r sigma^2 / (N_{r-1} |c|^2) against its closed form.
    double identity_error = 0.0;
    for (std::size_t r = 1; r <= k; ++r) {
      const double direct = std::exp(log_n_r(n, k, r) - log_n_r(n, k, r - 1)) * sigma2 / std::norm(c);
      const double closed = static_cast<double>((k - r + 1) * (k - r + 1)) * sigma2 /
                            (static_cast<double>((n - r + 1) * r) * std::norm(c));
      if (closed != 0.0) identity_error = std::max(identity_error, std::abs(direct - closed) / closed);
    }
    SummaryRow row{"n=" + std::to_string(n), {}};
    row.values = {
        {"n", static_cast<double>(n)},
        {"k", static_cast<double>(k)},
        {"c_re", c.real()},
        {"c_im", c.imag()},
        {"sigma2", sigma2},
        {"predicted_mean_re", p.mean.real()},
        {"predicted_mean_im", p.mean.imag()},
        {"predicted_variance", p.variance},
        {"predicted_relative_variance", p.relative_variance},
        {"first_order_ratio", p.first_order_ratio},
        {"mc_mean_re", mr},
        {"mc_mean_im", mi},
        {"mc_se_re", se_r},
        {"mc_se_im", se_i},
        {"mc_variance", vr + vi},
        {"z_re", se_r > 0.0 ? (mr - p.mean.real()) / se_r : 0.0},
        {"z_im", se_i > 0.0 ? (mi - p.mean.imag()) / se_i : 0.0},
        {"ratio_identity_rel_error", identity_error},
    };
    report.summary.push_back(std::move(row));
  }
  return report;
}

TrialReport run_jensen(const ExperimentConfig& cfg) {
  validate(cfg);
  return run_tasks("jensen", make_tasks(cfg.n_grid, cfg.trials, cfg.seed, cfg.replay_seed), cfg.threads,
                   [&](const Task& task) {
    const std::size_t n = task.n;
    const std::size_t k = cfg.k_values.empty() ? cfg.k_rule(n) : cfg.k_values[task.trial % cfg.k_values.size()];
    const RootSet roots = RootSet::from_samples(sample(cfg.measure, n, derive_seed(task.seed, "roots")));
    const RootSet zeros = derivative_roots(roots, k, cfg.method, derive_seed(task.seed, "solver"));
    JensenOptions options;
    options.grid_points = cfg.grid_points;
    for (std::size_t attempt = 0; attempt < 100; ++attempt) {
      const MobiusMap u = sample_mobius(derive_seed(task.seed, "mobius", {attempt}));
      JensenAudit audit;
      try {
        audit = jensen_audit(roots, zeros, k, u, options);
      } catch (const DegenerateConfigurationError&) {
        continue;
      }
      TrialOutput out;
      out.k = k;
      out.metrics = {
          {"lhs", audit.lhs},
          {"rhs", audit.rhs},
          {"slack", audit.slack},
          {"tolerance", audit.tolerance},
          {"passed", bool_metric(audit.passed)},
          {"resamples", static_cast<double>(attempt)},
          {"u_alpha_re", u.alpha.real()}, {"u_alpha_im", u.alpha.imag()},
          {"u_beta_re", u.beta.real()},   {"u_beta_im", u.beta.imag()},
          {"u_gamma_re", u.gamma.real()}, {"u_gamma_im", u.gamma.imag()},
          {"u_delta_re", u.delta.real()}, {"u_delta_im", u.delta.imag()},
      };
      return out;
    }
    throw DegenerateConfigurationError("no admissible Moebius map in 100 draws");
  });
}

std::size_t counterexample_m(double q, std::size_t k) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q", "must lie in (0, 1)");
  if (k < 1) throw ValidationError("k", "must be at least 1");
  const double x = std::pow(1.0 - q, -static_cast<double>(k));
  if (!(x <= 1e6)) {
    throw ScaleError("m = ceil((1-q)^-k) = " + std::to_string(x) + " exceeds the cap of 1e6");
  }
  // Absorb rounding in pow when (1-q)^-k is an integer.
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

double counterexample_p_exact(double q, std::size_t k) {
  const std::size_t m = counterexample_m(q, k);
  const double nonzero = std::pow(1.0 - q, static_cast<double>(k));
  return std::exp(static_cast<double>(m) * std::log1p(-nonzero));
}

CounterexampleResult run_counterexample(double q, std::size_t k, std::size_t trials, std::uint64_t seed,
                                        unsigned threads) {
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  CounterexampleResult res;
  res.q = q;
  res.k = k;
  res.m = counterexample_m(q, k);
  res.trials = trials;
  res.p_exact = counterexample_p_exact(q, k);

  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::size_t> vanish(blocks, 0), zero_sum(blocks, 0);
  const double half = (1.0 - q) / 2.0;
  parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
    const std::size_t end = std::min(trials, (b + 1) * kBlock);
    for (std::size_t t = b * kBlock; t < end; ++t) {
      CounterRng rng(derive_seed(seed, "counterexample", {t}));
      std::int64_t s = 0;
      bool all_vanish = true;
      for (std::size_t i = 0; i < res.m; ++i) {
        std::int64_t product = 1;
        for (std::size_t j = 0; j < k; ++j) {
          const double u = rng.uniform();
          const std::int64_t y = u < q ? 0 : (u < q + half ? 1 : -1);
          product *= y;
        }
        if (product != 0) all_vanish = false;
        s += product;
      }
      if (all_vanish) ++vanish[b];
      if (s == 0) ++zero_sum[b];
    }
  });
  std::size_t v = 0, z = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    v += vanish[b];
    z += zero_sum[b];
  }
  const double t = static_cast<double>(trials);
  res.p_hat = static_cast<double>(v) / t;
  res.se = std::sqrt(res.p_exact * (1.0 - res.p_exact) / t);
  res.deviation_se = res.se > 0.0 ? (res.p_hat - res.p_exact) / res.se : 0.0;
  res.p_hat_interval = wilson_interval(v, trials);
  res.p_sum_zero = static_cast<double>(z) / t;
  res.p_sum_zero_interval = wilson_interval(z, trials);
  return res;
}

double cw_bound(double alpha, std::size_t k, double moment_estimate, double q_param, double C) {
  if (!(alpha > 0.0) || k < 1 || !(moment_estimate > 0.0) || !(q_param > 0.0) || !(C > 0.0)) {
    throw ValidationError("cw_bound", "all inputs must be positive");
  }
  return C * q_param * std::pow(alpha, 1.0 / static_cast<double>(k)) / std::pow(moment_estimate, 1.0 / q_param);
}

double log_cw_bound(double log_alpha, std::size_t k, double log_moment, double q_param, double C) {
  if (k < 1 || !(q_param > 0.0) || !(C > 0.0)) {
    throw ValidationError("cw_bound", "k, q and C must be positive");
  }
  return std::log(C) + std::log(q_param) + log_alpha / static_cast<double>(k) - log_moment / q_param;
}

double AlphaRule::operator()(std::size_t n) const {
  return c * std::pow(static_cast<double>(n), -exponent);
}

void validate(const PerturbationConfig& cfg) {
  for (const auto& [name, spec] : {std::pair{"mu", &cfg.mu}, std::pair{"nu", &cfg.nu}}) {
    try {
      validate(*spec);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(name) + "." + e.field(), e.what());
    }
  }
  validate_grid(cfg.n_grid, cfg.k_rule, cfg.trials);
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const double a = cfg.alpha(cfg.n_grid[i]);
    if (!(a >= 0.0 && a < 1.0)) {
      throw ValidationError("alpha", "alpha(" + std::to_string(cfg.n_grid[i]) + ") = " +
                                         std::to_string(a) + " is outside [0, 1)");
    }
  }
  if (!(cfg.chernoff_delta > 0.0 && cfg.chernoff_delta < 1.0)) {
    throw ValidationError("chernoff_delta", "must lie in (0, 1)");
  }
}

PerturbationResult run_perturbation(const PerturbationConfig& cfg) {
  validate(cfg);
  PerturbationResult result;
  result.orders = {0, 1};
  for (std::size_t n : cfg.n_grid) {
    const std::size_t k = cfg.k_rule(n);
    if (std::find(result.orders.begin(), result.orders.end(), k) == result.orders.end()) {
      result.orders.push_back(k);
    }
  }
  std::sort(result.orders.begin(), result.orders.end());
  result.report = run_tasks(
      "perturbation", make_tasks(cfg.n_grid, cfg.trials, cfg.seed, cfg.replay_seed), cfg.threads,
      [&](const Task& task) {
        const std::size_t n = task.n, k = cfg.k_rule(n);
        const double alpha = cfg.alpha(n);
        // The mu draws use the same stream as run_convergence.
        std::vector<Complex> points = sample(cfg.mu, n, derive_seed(task.seed, "roots"));
        const std::vector<Complex> noise = sample(cfg.nu, n, derive_seed(task.seed, "noise"));
        std::size_t nu_count = 0;
        if (cfg.deterministic_split) {
          nu_count = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
          for (std::size_t i = n - nu_count; i < n; ++i) points[i] = noise[i];
        } else {
          const std::uint64_t split = derive_seed(task.seed, "split");
          for (std::size_t i = 0; i < n; ++i) {
            CounterRng rng(stream_key(split, i));
            if (rng.bernoulli(alpha)) {
              points[i] = noise[i];
              ++nu_count;
            }
          }
        }
        const RootSet roots = RootSet::from_samples(points);
        const RootSet first = derivative_roots(roots, 1, cfg.method, derive_seed(task.seed, "solver-first"));
        const RootSet zeros = derivative_roots(roots, k, cfg.method, derive_seed(task.seed, "solver"));
        const EmpiricalMeasure reference = reference_measure(
            cfg.mu, cfg.reference_size ? cfg.reference_size : n, derive_seed(task.seed, "reference"));
        const HullCheck hull1 = gauss_lucas_check(roots, first, cfg.hull_tolerance);
        const HullCheck hullk = gauss_lucas_check(roots, zeros, cfg.hull_tolerance);
        const double dn = static_cast<double>(n);

        TrialOutput out;
        out.k = k;
        out.metrics = {
            {"w1", w1_distance(EmpiricalMeasure::from_roots(zeros), reference)},
            {"alpha", alpha},
            {"nu_count", static_cast<double>(nu_count)},
            {"chernoff_half", dn * alpha / 2.0},
            {"below_half", bool_metric(static_cast<double>(nu_count) <= dn * alpha / 2.0)},
            {"chernoff_delta_n", cfg.chernoff_delta * dn},
            {"above_delta", bool_metric(static_cast<double>(nu_count) >= cfg.chernoff_delta * dn)},
            {"first_order_count", static_cast<double>(first.degree())},
            {"zero_count", static_cast<double>(zeros.degree())},
            {"degree_ok", bool_metric(first.degree() == n - 1 && zeros.degree() == n - k)},
            {"hull_max_distance", std::max(hull1.max_distance, hullk.max_distance)},
            {"hull_ok", bool_metric(hull1.ok && hullk.ok)},
        };
        const auto emit = [&](const RootSet& set, std::size_t order) {
          for (std::size_t i = 0; i < set.size(); ++i) {
            out.scatter.push_back({n, task.trial, order, set.points[i], set.multiplicities[i]});
          }
        };
        emit(roots, 0);
        emit(first, 1);
        if (k != 1) emit(zeros, k);
        return out;
      },
      &result.scatter);

  for (std::size_t n : cfg.n_grid) {
    const double alpha = cfg.alpha(n), dn = static_cast<double>(n);
    SummaryRow row{"n=" + std::to_string(n), {}};
    row.values = {
        {"n", dn},
        {"alpha", alpha},
        {"chernoff_half_bound", std::exp(-dn * alpha / 8.0)},
        // (e alpha / delta)^{delta n}, reported in logs.
        {"log_chernoff_delta_bound",
         alpha > 0.0 ? cfg.chernoff_delta * dn * std::log(std::exp(1.0) * alpha / cfg.chernoff_delta)
                     : -std::numeric_limits<double>::infinity()},
    };
    result.report.summary.push_back(std::move(row));
  }
  return result;
}

void validate(const FrostmanConfig& cfg) {
  try {
    validate(cfg.measure);
  } catch (const ValidationError& e) {
    throw ValidationError("measure." + e.field(), e.what());
  }
  if (cfg.sample_size < 1) throw ValidationError("sample_size", "must be at least 1");
  if (cfg.probes.empty() && cfg.probe_count < 1) throw ValidationError("probe_count", "must be at least 1");
  if (cfg.r_grid.empty()) throw ValidationError("r_grid", "must be nonempty");
  for (std::size_t i = 0; i < cfg.r_grid.size(); ++i) {
    if (!(cfg.r_grid[i] > 0.0 && cfg.r_grid[i] < 1.0) || (i > 0 && !(cfg.r_grid[i] < cfg.r_grid[i - 1]))) {
      throw ValidationError("r_grid[" + std::to_string(i) + "]", "radii must lie in (0, 1) and strictly decrease");
    }
  }
  for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
    if (!in_support(cfg.measure, cfg.probes[i], 1e-9)) {
      throw ValidationError("probes[" + std::to_string(i) + "]", "probe point is not in the support");
    }
  }
}

double frostman_slope(const std::vector<FrostmanEstimate>& estimates) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& e : estimates) {
    if (!(e.mass > 0.0)) continue;
    const double x = std::log(e.radius), y = std::log(e.mass);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nan("");
  const double c = static_cast<double>(count);
  const double denom = sxx - sx * sx / c;
  if (denom <= 0.0) return std::nan("");
  return (sxy - sx * sy / c) / denom;
}

TrialReport run_frostman(const FrostmanConfig& cfg) {
  validate(cfg);
  const std::vector<Complex> samples = sample(cfg.measure, cfg.sample_size, derive_seed(cfg.seed, "samples"));
  const std::vector<Complex> probes =
      cfg.probes.empty() ? sample(cfg.measure, cfg.probe_count, derive_seed(cfg.seed, "probes")) : cfg.probes;
  TrialReport report;
  report.experiment = "frostman";
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto start = std::chrono::steady_clock::now();
    const auto estimates = frostman_exponent(samples, probes[p], cfg.r_grid);
    double minimum = std::numeric_limits<double>::infinity();
    for (const auto& e : estimates) minimum = std::min(minimum, e.estimate);
    const double slope = frostman_slope(estimates);

    TrialRecord r;
    r.n = cfg.sample_size;
    r.trial = p;
    r.seed = cfg.seed;
    r.metrics = {{"probe_re", probes[p].real()}, {"probe_im", probes[p].imag()}, {"slope", slope},
                 {"min_estimate", minimum}};
    for (std::size_t j = 0; j < estimates.size(); ++j) {
      r.metrics.emplace_back("mass[" + std::to_string(j) + "]", estimates[j].mass);
      r.metrics.emplace_back("estimate[" + std::to_string(j) + "]", estimates[j].estimate);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.records.push_back(std::move(r));
    report.summary.push_back({"probe=" + std::to_string(p),
                              {{"slope", slope},
                               {"min_estimate", minimum},
                               {"positive", bool_metric(slope > cfg.positive_threshold)}}});
  }
  report.aggregates = aggregate_records(report.records);
  return report;
}

}  // namespace derivroots
