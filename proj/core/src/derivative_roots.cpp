#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "derivroots/errors.hpp"
#include "derivroots/parallel.hpp"
#include "derivroots/rng.hpp"
#include "derivroots/rootfind.hpp"
#include "derivroots/sympoly.hpp"

namespace derivroots {

namespace {

struct Atom {
  Complex point;
  std::size_t multiplicity;  // in P^(k)
};

// q / (z - a), remainder dropped.
std::vector<HpComplex> deflate(const std::vector<HpComplex>& q, const HpComplex& a) {
  const std::size_t n = q.size() - 1;
  std::vector<HpComplex> out(n);
  HpComplex carry = q[n];
  for (std::size_t j = n; j-- > 0;) {
    out[j] = carry;
    carry = q[j] + a * carry;
  }
  return out;
}

RootSet merge(const std::vector<Atom>& atoms, const RootSet& found) {
  std::vector<std::pair<Complex, std::size_t>> all;
  for (const Atom& a : atoms) all.emplace_back(a.point, a.multiplicity);
  for (std::size_t i = 0; i < found.size(); ++i) {
    all.emplace_back(found.points[i], found.multiplicities[i]);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  RootSet out;
  for (const auto& [z, m] : all) {
    out.points.push_back(z);
    out.multiplicities.push_back(m);
  }
  return out;
}

RootSet coefficient_method(const RootSet& roots, std::size_t k, const std::vector<Atom>& atoms,
                           std::size_t unknown, std::uint64_t seed,
                           const DerivativeOptions& options) {
  HpCoefficients c = differentiate(coeffs_from_roots_hp(roots, options.degree_cap), k);
  for (const Atom& a : atoms) {
    const HpComplex ha = to_hp(a.point);
    for (std::size_t m = 0; m < a.multiplicity; ++m) c.coeffs = deflate(c.coeffs, ha);
  }
  if (unknown == 0) return {};
  return aberth(c, seed, options.aberth);
}

inline Complex reciprocal(Complex d) {
  const double den = d.real() * d.real() + d.imag() * d.imag();
  return {d.real() / den, -d.imag() / den};
}

class RatioSolver {
 public:
  RatioSolver(const RootSet& roots, std::size_t k, const std::vector<Atom>& atoms,
              const DerivativeOptions& options)
      : evaluator_(roots.expanded()), k_(k), atoms_(atoms), options_(options) {}

  std::vector<Complex> initial_guesses(const RootSet& roots, std::size_t unknown,
                                       std::uint64_t seed) const {
    CounterRng rng(derive_seed(seed, "ratio-init", {roots.degree(), k_}));
    Complex centroid = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      centroid += static_cast<double>(roots.multiplicities[i]) * roots.points[i];
      total += static_cast<double>(roots.multiplicities[i]);
    }
    centroid /= total;
    double spread = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      spread += static_cast<double>(roots.multiplicities[i]) * std::norm(roots.points[i] - centroid);
    }
    spread = std::sqrt(spread / total);
    if (spread == 0.0) spread = 1.0;

    std::vector<Complex> candidates;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (roots.multiplicities[i] <= k_) {
        candidates.insert(candidates.end(), roots.multiplicities[i], roots.points[i]);
      }
    }
    std::vector<Complex> z(unknown);
    const double jitter = 1e-3 * spread / std::sqrt(static_cast<double>(roots.degree()));
    if (candidates.size() >= unknown) {
      // Pulled slightly toward the centroid from a random subset of the
      // parent roots: zeros of P^(k) sit inside the hull, near the roots.
      for (std::size_t i = 0; i < unknown; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size() - i));
        std::swap(candidates[i], candidates[std::min(j, candidates.size() - 1)]);
        const double t = 0.01 * (0.5 + rng.uniform());
        z[i] = candidates[i] + t * (centroid - candidates[i]) + jitter * rng.complex_normal();
      }
    } else {
      // Random convex combinations of three parent points.
      for (std::size_t i = 0; i < unknown; ++i) {
        Complex p = 0.0;
        double wsum = 0.0;
        for (int t = 0; t < 3; ++t) {
          const std::size_t g = std::min(roots.size() - 1,
                                         static_cast<std::size_t>(rng.uniform() * static_cast<double>(roots.size())));
          const double w = -std::log(rng.uniform_open_zero());
          p += w * roots.points[g];
          wsum += w;
        }
        z[i] = p / wsum + jitter * rng.complex_normal();
      }
    }
    return z;
  }

  std::vector<Complex> solve(std::vector<Complex> z) const {
    const std::size_t u = z.size();
    std::vector<char> done(u, 0);
    std::vector<double> previous(u, std::numeric_limits<double>::infinity());
    std::vector<Complex> step(u);
    std::vector<double> newton_size(u, 0.0);
    double worst = 0.0;
    for (std::size_t it = 0; it < options_.aberth.max_iterations; ++it) {
      parallel_for(u, options_.aberth.threads, [&](std::size_t i) {
        step[i] = done[i] ? Complex(0.0, 0.0) : displacement(z, i, newton_size[i]);
      });
      bool all = true;
      worst = 0.0;
      for (std::size_t i = 0; i < u; ++i) {
        if (done[i]) continue;
        z[i] -= step[i];
        // The Newton correction guards against approximants that stop only
        // because a neighbour sits on top of them.
        const double size = std::max(std::abs(step[i]), newton_size[i]);
        const double scale = 1.0 + std::abs(z[i]);
        worst = std::max(worst, size / scale);
        if (size <= options_.aberth.tolerance * scale ||
            (size <= options_.stall_tolerance * scale && size >= 0.5 * previous[i])) {
          done[i] = 1;
        } else {
          all = false;
        }
        previous[i] = size;
      }
      if (all) return z;
    }
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < u; ++i) {
      if (!done[i]) pending.push_back(i);
    }
    throw ConvergenceError("ratio iteration did not converge in " +
                               std::to_string(options_.aberth.max_iterations) + " sweeps (" +
                               std::to_string(pending.size()) + " approximants pending)",
                           worst, pending);
  }

 private:
  Complex displacement(const std::vector<Complex>& z, std::size_t i, double& newton_size) const {
    const Complex zi = z[i];
    Complex repulsion = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (j != i && z[j] != zi) repulsion += reciprocal(zi - z[j]);
    }
    for (const Atom& a : atoms_) {
      if (a.point != zi) repulsion += static_cast<double>(a.multiplicity) * reciprocal(zi - a.point);
    }

    Complex w;
    try {
      const SymTable t = evaluator_.table(zi, k_ + 1);
      const Complex newton = newton_ratio_from(t.values[k_], t.values[k_ + 1], k_);
      newton_size = std::abs(newton);
      if (newton == Complex(0.0, 0.0)) return 0.0;
      const Complex denom = 1.0 - newton * repulsion;
      w = denom == Complex(0.0, 0.0) ? newton : newton / denom;
    } catch (const PoleError&) {
      newton_size = std::numeric_limits<double>::infinity();
      // Exactly on a root of P: step off it.
      return Complex(-1e-10, -1e-10) * (1.0 + std::abs(zi));
    } catch (const DerivativeVanishesError&) {
      newton_size = std::numeric_limits<double>::infinity();
      w = -1.0 / repulsion;
    } catch (const MagnitudeError&) {
      newton_size = std::numeric_limits<double>::infinity();
      w = -1.0 / repulsion;
    }
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      return Complex(-1e-8, -1e-8) * (1.0 + std::abs(zi));
    }
    // Halve steps that would land on a pole of e_k.
    for (int halvings = 0; halvings < 60; ++halvings) {
      if (!near_pole(zi - w)) break;
      w *= 0.5;
    }
    return w;
  }

  bool near_pole(Complex z) const {
    for (const auto& g : evaluator_.groups()) {
      if (std::abs(z - g.first) < options_.pole_guard * (1.0 + std::abs(g.first))) return true;
    }
    return false;
  }

  SymEvaluator evaluator_;
  std::size_t k_;
  const std::vector<Atom>& atoms_;
  const DerivativeOptions& options_;
};

// One guess per zero of Q' for Q with distinct points rho_g of multiplicity
// m_g: solving m_g/(z - rho_g) + R_g = 0 with R_g the field of the other
// points frozen at rho_g gives z = rho_g - m_g/R_g. There is one zero fewer
// than points; the point whose guess moves farthest is dropped.
std::vector<Complex> first_order_guesses(const RootSet& q, std::uint64_t seed, std::size_t step) {
  const std::size_t g = q.size();
  std::vector<Complex> guess(g);
  std::vector<double> reach(g);
  for (std::size_t a = 0; a < g; ++a) {
    Complex field = 0.0;
    for (std::size_t b = 0; b < g; ++b) {
      if (b != a) field += static_cast<double>(q.multiplicities[b]) * reciprocal(q.points[a] - q.points[b]);
    }
    const double m = static_cast<double>(q.multiplicities[a]);
    if (field == Complex(0.0, 0.0)) {
      guess[a] = q.points[a];
      reach[a] = std::numeric_limits<double>::infinity();
    } else {
      const Complex move = m * reciprocal(field);
      guess[a] = q.points[a] - move;
      reach[a] = std::abs(move);
    }
  }
  const std::size_t dropped = static_cast<std::size_t>(
      std::max_element(reach.begin(), reach.end()) - reach.begin());
  CounterRng rng(derive_seed(seed, "ratio-chain", {q.degree(), step}));
  std::vector<Complex> out;
  out.reserve(g - 1);
  for (std::size_t a = 0; a < g; ++a) {
    if (a == dropped) continue;
    out.push_back(guess[a] + 1e-9 * (1.0 + std::abs(guess[a])) * rng.complex_normal());
  }
  return out;
}

RootSet chained_ratio(const RootSet& roots, std::size_t k, std::uint64_t seed,
                      const DerivativeOptions& options) {
  RootSet current = roots;
  DerivativeOptions first = options;
  for (std::size_t step = 1; step <= k; ++step) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (current.multiplicities[i] > 1) atoms.push_back({current.points[i], current.multiplicities[i] - 1});
    }
    RootSet found;
    if (current.size() > 1) {
      const RatioSolver solver(current, 1, atoms, first);
      found = cluster_roots(solver.solve(first_order_guesses(current, seed, step)),
                            options.aberth.cluster_radius);
    }
    current = merge(atoms, found);
  }
  return current;
}

}  // namespace

RootSet derivative_roots(const RootSet& input, std::size_t k, DerivativeMethod method,
                         std::uint64_t seed, const DerivativeOptions& options) {
  validate(input);
  // Identical points given separately are merged so multiplicities are exact.
  const RootSet roots = RootSet::from_samples(input.expanded());
  const std::size_t n = roots.degree();
  if (k == 0) throw ValidationError("k", "derivative order must be positive");
  if (k >= n) {
    throw ValidationError("k", "derivative order " + std::to_string(k) +
                                   " must be below the degree " + std::to_string(n));
  }
  std::vector<Atom> atoms;
  std::size_t carried = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots.multiplicities[i] > k) {
      atoms.push_back({roots.points[i], roots.multiplicities[i] - k});
      carried += roots.multiplicities[i] - k;
    }
  }
  const std::size_t unknown = n - k - carried;

  RootSet found;
  if (method == DerivativeMethod::coefficient) {
    found = coefficient_method(roots, k, atoms, unknown, seed, options);
  } else if (options.chained) {
    return chained_ratio(roots, k, seed, options);
  } else if (unknown > 0) {
    const RatioSolver solver(roots, k, atoms, options);
    const auto z = solver.solve(solver.initial_guesses(roots, unknown, seed));
    found = cluster_roots(z, options.aberth.cluster_radius);
  }
  return merge(atoms, found);
}

}  // namespace derivroots
