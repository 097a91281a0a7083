#include "derivroots/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "derivroots/errors.hpp"
#include "derivroots/parallel.hpp"

namespace derivroots {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string indexed(const std::string& path, const char* field, std::size_t i) {
  return (path.empty() ? std::string() : path + ".") + field + "[" + std::to_string(i) + "]";
}

std::string child(const std::string& path, const char* field) {
  return path.empty() ? std::string(field) : path + "." + field;
}

void check_radius(const std::string& path, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError(child(path, "radius"),
                          "radius must be positive and finite, got " + std::to_string(radius));
  }
}

void check_weights(const std::string& path, const char* field, std::span<const double> weights) {
  if (weights.empty()) throw ValidationError(child(path, field), "must be nonempty");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ValidationError(indexed(path, field, i),
                            "weight must be positive, got " + std::to_string(weights[i]));
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw ValidationError(child(path, field),
                          "weights sum to " + std::to_string(total) + ", expected 1");
  }
}

void validate_at(const MeasureSpec& spec, const std::string& path, int depth) {
  std::visit(
      Overloaded{
          [&](const Discrete& d) {
            if (d.atoms.size() != d.weights.size()) {
              throw ValidationError(child(path, "weights"),
                                    "atoms and weights differ in length");
            }
            check_weights(path, "weights", d.weights);
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
              if (!finite(d.atoms[i])) {
                throw ValidationError(indexed(path, "atoms", i), "atom is not finite");
              }
              for (std::size_t j = 0; j < i; ++j) {
                if (d.atoms[i] == d.atoms[j]) {
                  throw ValidationError(indexed(path, "atoms", i),
                                        "duplicate of atom " + std::to_string(j));
                }
              }
            }
          },
          [&](const UniformCircle& c) {
            if (!finite(c.center)) throw ValidationError(child(path, "center"), "not finite");
            check_radius(path, c.radius);
          },
          [&](const UniformDisk& c) {
            if (!finite(c.center)) throw ValidationError(child(path, "center"), "not finite");
            check_radius(path, c.radius);
          },
          [&](const CantorSegment& c) {
            if (!finite(c.start) || !finite(c.end) || c.start == c.end) {
              throw ValidationError(child(path, "endpoints"),
                                    "endpoints must be finite and distinct");
            }
            if (!(c.ratio > 0.0 && c.ratio < 0.5)) {
              throw ValidationError(child(path, "ratio"),
                                    "ratio must lie in (0, 1/2), got " + std::to_string(c.ratio));
            }
          },
          [&](const Mixture& m) {
            if (depth > kMaxMixtureDepth) {
              throw ValidationError(path.empty() ? "components" : path,
                                    "mixture nesting deeper than " +
                                        std::to_string(kMaxMixtureDepth));
            }
            if (m.components.empty()) {
              throw ValidationError(child(path, "components"), "must be nonempty");
            }
            std::vector<double> weights;
            for (const auto& c : m.components) weights.push_back(c.weight);
            for (std::size_t i = 0; i < weights.size(); ++i) {
              if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
                throw ValidationError(indexed(path, "components", i) + ".weight",
                                      "weight must be positive, got " +
                                          std::to_string(weights[i]));
              }
            }
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            if (std::abs(total - 1.0) > kWeightSumTolerance) {
              throw ValidationError(child(path, "components") + ".weight",
                                    "mixture weights sum to " + std::to_string(total) +
                                        ", expected 1");
            }
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              validate_at(m.components[i].measure, indexed(path, "components", i) + ".measure",
                          depth + 1);
            }
          },
      },
      spec.law);
}

std::size_t pick_index(std::span<const double> weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

Complex sample_cantor(const CantorSegment& c, CounterRng& rng) {
  // 52 ternary-style digits; Horner from the deepest digit up.
  const std::uint64_t bits = rng();
  double x = 0.0;
  for (int j = 51; j >= 0; --j) {
    const double digit = static_cast<double>((bits >> j) & 1ULL);
    x = c.ratio * x + digit * (1.0 - c.ratio);
  }
  return c.start + x * (c.end - c.start);
}

double segment_distance(Complex a, Complex b, Complex z) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  double t = ((z - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

// Distance to the support of the non-atomic parts; atoms are handled as poles.
double continuous_support_distance(const MeasureSpec& spec, Complex z) {
  if (std::holds_alternative<Discrete>(spec.law)) return std::numeric_limits<double>::infinity();
  if (const auto* m = std::get_if<Mixture>(&spec.law)) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : m->components) {
      best = std::min(best, continuous_support_distance(c.measure, z));
    }
    return best;
  }
  return support_distance(spec, z);
}

}  // namespace

MeasureSpec make_discrete(std::vector<Complex> atoms, std::vector<double> weights) {
  return MeasureSpec{Discrete{std::move(atoms), std::move(weights)}};
}
MeasureSpec make_circle(Complex center, double radius) {
  return MeasureSpec{UniformCircle{center, radius}};
}
MeasureSpec make_disk(Complex center, double radius) {
  return MeasureSpec{UniformDisk{center, radius}};
}
MeasureSpec make_cantor(Complex start, Complex end, double ratio) {
  return MeasureSpec{CantorSegment{start, end, ratio}};
}
MeasureSpec make_mixture(std::vector<MixtureComponent> components) {
  return MeasureSpec{Mixture{std::move(components)}};
}

std::string type_name(const MeasureSpec& spec) {
  return std::visit(Overloaded{
                        [](const Discrete&) { return std::string("discrete"); },
                        [](const UniformCircle&) { return std::string("uniform_circle"); },
                        [](const UniformDisk&) { return std::string("uniform_disk"); },
                        [](const CantorSegment&) { return std::string("cantor_segment"); },
                        [](const Mixture&) { return std::string("mixture"); },
                    },
                    spec.law);
}

void validate(const MeasureSpec& spec) { validate_at(spec, "", 1); }

TaggedSample sample_tagged(const MeasureSpec& spec, CounterRng& rng) {
  return std::visit(
      Overloaded{
          [&](const Discrete& d) {
            return TaggedSample{d.atoms[pick_index(d.weights, rng.uniform())], true};
          },
          [&](const UniformCircle& c) {
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            return TaggedSample{c.center + std::polar(c.radius, theta), true};
          },
          [&](const UniformDisk& c) {
            const double rho = c.radius * std::sqrt(rng.uniform());
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            return TaggedSample{c.center + std::polar(rho, theta), false};
          },
          [&](const CantorSegment& c) { return TaggedSample{sample_cantor(c, rng), true}; },
          [&](const Mixture& m) {
            std::vector<double> weights;
            weights.reserve(m.components.size());
            for (const auto& c : m.components) weights.push_back(c.weight);
            const std::size_t i = pick_index(weights, rng.uniform());
            return sample_tagged(m.components[i].measure, rng);
          },
      },
      spec.law);
}

Complex sample_one(const MeasureSpec& spec, CounterRng& rng) {
  return sample_tagged(spec, rng).value;
}

std::vector<Complex> sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed,
                            unsigned threads) {
  validate(spec);
  if (n == 0) throw ValidationError("n", "sample size must be at least 1");
  std::vector<Complex> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    CounterRng rng(stream_key(seed, i));
    out[i] = sample_one(spec, rng);
  });
  return out;
}

double ac_density(const MeasureSpec& spec, Complex z) {
  return std::visit(Overloaded{
                        [&](const UniformDisk& c) {
                          return std::abs(z - c.center) <= c.radius
                                     ? 1.0 / (std::numbers::pi * c.radius * c.radius)
                                     : 0.0;
                        },
                        [&](const Mixture& m) {
                          double total = 0.0;
                          for (const auto& c : m.components) {
                            total += c.weight * ac_density(c.measure, z);
                          }
                          return total;
                        },
                        [](const auto&) { return 0.0; },
                    },
                    spec.law);
}

double support_distance(const MeasureSpec& spec, Complex z) {
  return std::visit(
      Overloaded{
          [&](const Discrete& d) {
            double best = std::numeric_limits<double>::infinity();
            for (const Complex& a : d.atoms) best = std::min(best, std::abs(z - a));
            return best;
          },
          [&](const UniformCircle& c) { return std::abs(std::abs(z - c.center) - c.radius); },
          [&](const UniformDisk& c) { return std::max(0.0, std::abs(z - c.center) - c.radius); },
          [&](const CantorSegment& c) { return segment_distance(c.start, c.end, z); },
          [&](const Mixture& m) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : m.components) best = std::min(best, support_distance(c.measure, z));
            return best;
          },
      },
      spec.law);
}

bool in_support(const MeasureSpec& spec, Complex z, double tol) {
  return std::visit(
      Overloaded{
          [&](const Discrete& d) {
            return std::any_of(d.atoms.begin(), d.atoms.end(),
                               [&](Complex a) { return std::abs(z - a) <= tol; });
          },
          [&](const Mixture& m) {
            return std::any_of(m.components.begin(), m.components.end(),
                               [&](const MixtureComponent& c) { return in_support(c.measure, z, tol); });
          },
          [&](const auto&) { return support_distance(spec, z) <= tol; },
      },
      spec.law);
}

double cantor_dimension(double ratio) { return std::log(2.0) / std::log(1.0 / ratio); }

Estimate cauchy_transform(const MeasureSpec& spec, Complex z, const QuadratureOptions& options) {
  return std::visit(
      Overloaded{
          [&](const Discrete& d) {
            Complex g = 0.0;
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
              if (z == d.atoms[i]) throw PoleError(z, "Cauchy transform evaluated at an atom");
              g += d.weights[i] / (z - d.atoms[i]);
            }
            return Estimate{g, 0.0};
          },
          [&](const UniformCircle& c) {
            const double dist = std::abs(z - c.center);
            if (std::abs(dist - c.radius) < options.exclusion_tube) {
              throw AccuracyError(std::abs(dist - c.radius),
                                  "point lies within the exclusion tube of the circle");
            }
            return Estimate{dist > c.radius ? 1.0 / (z - c.center) : Complex(0.0, 0.0), 0.0};
          },
          [&](const UniformDisk& c) {
            const Complex w = z - c.center;
            if (std::abs(w) >= c.radius) return Estimate{1.0 / w, 0.0};
            return Estimate{std::conj(w) / (c.radius * c.radius), 0.0};
          },
          [&](const CantorSegment&) { return cauchy_transform_quadrature(spec, z, options); },
          [&](const Mixture& m) {
            Estimate total{0.0, 0.0};
            for (const auto& c : m.components) {
              const Estimate part = cauchy_transform(c.measure, z, options);
              total.value += c.weight * part.value;
              total.error += c.weight * part.error;
            }
            return total;
          },
      },
      spec.law);
}

Estimate cauchy_transform_quadrature(const MeasureSpec& spec, Complex z,
                                     const QuadratureOptions& options) {
  validate(spec);
  const double dist = continuous_support_distance(spec, z);
  if (dist < options.exclusion_tube) {
    throw AccuracyError(dist, "point lies within the exclusion tube of the support");
  }
  return expectation(
      spec,
      [z](Complex u) {
        if (u == z) throw PoleError(z, "Cauchy transform evaluated at an atom");
        return 1.0 / (z - u);
      },
      options);
}

Estimate inverse_square_moment(const MeasureSpec& spec, Complex a,
                               const QuadratureOptions& options) {
  return std::visit(
      Overloaded{
          [&](const Discrete& d) {
            double total = 0.0;
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
              if (a == d.atoms[i]) throw PoleError(a, "second moment evaluated at an atom");
              total += d.weights[i] / std::norm(a - d.atoms[i]);
            }
            return Estimate{total, 0.0};
          },
          [&](const UniformCircle& c) {
            const double d2 = std::norm(a - c.center);
            const double r2 = c.radius * c.radius;
            if (std::abs(std::sqrt(d2) - c.radius) < options.exclusion_tube) {
              return Estimate{std::numeric_limits<double>::infinity(), 0.0};
            }
            // Poisson kernel mean.
            return Estimate{1.0 / std::abs(d2 - r2), 0.0};
          },
          [&](const UniformDisk& c) {
            const double d2 = std::norm(a - c.center);
            const double r2 = c.radius * c.radius;
            if (d2 <= r2) return Estimate{std::numeric_limits<double>::infinity(), 0.0};
            return Estimate{std::log(d2 / (d2 - r2)) / r2, 0.0};
          },
          [&](const CantorSegment&) {
            if (support_distance(spec, a) < options.exclusion_tube) {
              throw AccuracyError(support_distance(spec, a),
                                  "point lies within the exclusion tube of the support");
            }
            return expectation(spec, [a](Complex u) { return Complex(1.0 / std::norm(a - u), 0.0); },
                               options);
          },
          [&](const Mixture& m) {
            Estimate total{0.0, 0.0};
            for (const auto& c : m.components) {
              const Estimate part = inverse_square_moment(c.measure, a, options);
              total.value += c.weight * part.value;
              total.error += c.weight * part.error;
            }
            return total;
          },
      },
      spec.law);
}

std::vector<FrostmanEstimate> frostman_exponent(std::span<const Complex> samples, Complex x,
                                                std::span<const double> r_grid) {
  if (samples.empty()) throw ValidationError("samples", "must be nonempty");
  if (r_grid.empty()) throw ValidationError("r_grid", "must be nonempty");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0 && r_grid[i] < 1.0)) {
      throw ValidationError("r_grid[" + std::to_string(i) + "]", "radius must lie in (0, 1)");
    }
    if (i > 0 && !(r_grid[i] < r_grid[i - 1])) {
      throw ValidationError("r_grid[" + std::to_string(i) + "]", "radii must strictly decrease");
    }
  }
  std::vector<double> distances(samples.size());
  std::transform(samples.begin(), samples.end(), distances.begin(),
                 [x](Complex s) { return std::abs(s - x); });
  std::sort(distances.begin(), distances.end());

  std::vector<FrostmanEstimate> out;
  out.reserve(r_grid.size());
  const double total = static_cast<double>(samples.size());
  for (double r : r_grid) {
    const auto inside = std::upper_bound(distances.begin(), distances.end(), r) - distances.begin();
    const double mass = static_cast<double>(inside) / total;
    FrostmanEstimate e{r, mass, 0.0};
    if (inside == 0) {
      e.estimate = std::numeric_limits<double>::infinity();
    } else if (inside == static_cast<std::ptrdiff_t>(samples.size())) {
      e.estimate = 0.0;
    } else {
      e.estimate = std::log(mass) / std::log(r);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace derivroots
