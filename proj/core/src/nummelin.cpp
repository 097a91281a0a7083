#include "derivroots/nummelin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "derivroots/errors.hpp"

namespace derivroots {

namespace {

constexpr int kMaxRejections = 1 << 20;

std::optional<DoeblinSource> find_source(const MeasureSpec& spec, double scale) {
  if (const auto* d = std::get_if<UniformDisk>(&spec.law)) {
    return DoeblinSource{d->center, d->radius,
                         scale / (std::numbers::pi * d->radius * d->radius)};
  }
  if (const auto* m = std::get_if<Mixture>(&spec.law)) {
    for (const auto& c : m->components) {
      if (auto s = find_source(c.measure, scale * c.weight)) return s;
    }
  }
  return std::nullopt;
}

double ks_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace

DoeblinParams nummelin_split(Complex z0, double r0, double c0, Complex a) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ValidationError("r0", "must be positive");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw ValidationError("c0", "must be positive");
  if (c0 * std::numbers::pi * r0 * r0 > 1.0 + 1e-12) {
    throw ValidationError("c0", "c0 * area(D(z0, r0)) exceeds 1");
  }
  if (a == z0) throw DegenerateConfigurationError("a coincides with z0: inversion is singular");
  const Complex p = a - z0;
  const double delta = std::abs(p);
  const double r_shrunk = std::min(r0, 0.5 * delta);
  // T_a(z0 + v) = 1/(p - v): the image of |v| <= r' is the disk with center
  // conj(p)/(delta^2 - r'^2) and radius r'/(delta^2 - r'^2).
  const double denom = delta * delta - r_shrunk * r_shrunk;
  DoeblinParams out;
  out.w_a = std::conj(p) / denom;
  out.r_a = 0.5 * r_shrunk / denom;
  const double m_a = std::pow(delta - r_shrunk, 4);
  out.c_a = std::min(1.0, c0 * m_a * std::numbers::pi * out.r_a * out.r_a);
  return out;
}

std::optional<DoeblinSource> doeblin_source(const MeasureSpec& spec) {
  return find_source(spec, 1.0);
}

Complex uniform_in_disk(Complex center, double radius, CounterRng& rng) {
  const double rho = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return center + std::polar(rho, theta);
}

std::vector<SplitDraw> split_sampler(const DoeblinParams& params, const PointSampler& residual,
                                     std::size_t n, std::uint64_t seed) {
  if (!(params.c_a >= 0.0 && params.c_a <= 1.0)) {
    throw ValidationError("c_a", "must lie in [0, 1]");
  }
  if (!(params.r_a > 0.0)) throw ValidationError("r_a", "must be positive");
  std::vector<SplitDraw> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(stream_key(seed, i));
    SplitDraw& d = out[i];
    d.epsilon = rng.uniform() < params.c_a;
    if (d.epsilon) {
      d.value = uniform_in_disk(params.w_a, params.r_a, rng);
    } else {
      d.value = residual(rng);
    }
  }
  return out;
}

PointSampler reciprocal_sampler(const MeasureSpec& spec, Complex a) {
  validate(spec);
  return [spec, a](CounterRng& rng) {
    for (;;) {
      const Complex xi = sample_one(spec, rng);
      if (xi != a) return 1.0 / (a - xi);
    }
  };
}

PointSampler residual_sampler(const MeasureSpec& spec, Complex a, const DoeblinParams& params) {
  validate(spec);
  if (params.c_a >= 1.0) {
    throw ValidationError("c_a", "residual law is undefined when c_a = 1");
  }
  const double uniform_density = params.c_a / (std::numbers::pi * params.r_a * params.r_a);
  return [spec, a, params, uniform_density](CounterRng& rng) {
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      const TaggedSample s = sample_tagged(spec, rng);
      if (s.value == a) continue;
      const Complex y = 1.0 / (a - s.value);
      if (s.singular || std::abs(y - params.w_a) > params.r_a) return y;
      // Density of Y at y is density(xi) * |a - xi|^4.
      const double f_y = ac_density(spec, s.value) * std::pow(std::abs(a - s.value), 4);
      const double keep = f_y > 0.0 ? 1.0 - uniform_density / f_y : 1.0;
      if (rng.uniform() < keep) return y;
    }
    throw AccuracyError(0.0, "residual sampler exceeded its rejection budget");
  };
}

DominationCheck check_domination(const DoeblinParams& params, std::span<const Complex> y_samples,
                                 int grid, double sigmas) {
  if (y_samples.empty()) throw ValidationError("samples", "must be nonempty");
  if (grid < 1) throw ValidationError("grid", "must be positive");
  const double side = 2.0 * params.r_a / grid;
  const double x0 = params.w_a.real() - params.r_a, y0 = params.w_a.imag() - params.r_a;
  std::vector<std::size_t> counts(static_cast<std::size_t>(grid) * grid, 0);
  for (const Complex& y : y_samples) {
    const auto ix = static_cast<long>(std::floor((y.real() - x0) / side));
    const auto iy = static_cast<long>(std::floor((y.imag() - y0) / side));
    if (ix < 0 || iy < 0 || ix >= grid || iy >= grid) continue;
    ++counts[static_cast<std::size_t>(iy) * grid + ix];
  }
  const double n = static_cast<double>(y_samples.size());
  const double disk_area = std::numbers::pi * params.r_a * params.r_a;
  const double required = params.c_a * side * side / disk_area;
  DominationCheck out;
  out.min_z_score = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      // A cell counts only if all four corners lie in the disk.
      bool inside = true;
      for (int cx = 0; cx < 2 && inside; ++cx) {
        for (int cy = 0; cy < 2 && inside; ++cy) {
          const Complex corner(x0 + (ix + cx) * side, y0 + (iy + cy) * side);
          inside = std::abs(corner - params.w_a) <= params.r_a;
        }
      }
      if (!inside) continue;
      ++out.cells_checked;
      const double p_hat = static_cast<double>(counts[static_cast<std::size_t>(iy) * grid + ix]) / n;
      const double p_ref = std::max(p_hat, required);
      const double se = std::sqrt(p_ref * (1.0 - p_ref) / n);
      const double z = (p_hat - required) / se;
      out.min_z_score = std::min(out.min_z_score, z);
      if (z < -sigmas) ++out.violations;
    }
  }
  out.passed = out.cells_checked > 0 && out.violations == 0;
  return out;
}

double ks_distance_2d(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) throw ValidationError("samples", "must be nonempty");
  std::vector<double> ar(a.size()), ai(a.size()), br(b.size()), bi(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ar[i] = a[i].real(), ai[i] = a[i].imag();
  for (std::size_t i = 0; i < b.size(); ++i) br[i] = b[i].real(), bi[i] = b[i].imag();
  return std::max(ks_1d(std::move(ar), std::move(br)), ks_1d(std::move(ai), std::move(bi)));
}

}  // namespace derivroots
