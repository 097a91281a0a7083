#include <algorithm>
#include <cmath>
#include <limits>

#include "derivroots/rootfind.hpp"

namespace derivroots {

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

double segment_distance(Complex a, Complex b, Complex z) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

std::vector<Complex> convex_hull(std::vector<Complex> points) {
  std::sort(points.begin(), points.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Complex> hull(2 * points.size());
  std::size_t h = 0;
  for (const Complex& p : points) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0.0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], points[i]) <= 0.0) --h;
    hull[h++] = points[i];
  }
  hull.resize(h - 1);
  return hull;
}

double hull_signed_distance(std::span<const Complex> hull, Complex z) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::abs(z - hull[0]);
  double edge = std::numeric_limits<double>::infinity();
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    edge = std::min(edge, segment_distance(a, b, z));
    if (cross(a, b, z) < 0.0) inside = false;
  }
  return inside ? -edge : edge;
}

HullCheck gauss_lucas_check(const RootSet& parent, const RootSet& child, double tol) {
  const auto hull = convex_hull(parent.points);
  HullCheck out{true, -std::numeric_limits<double>::infinity()};
  for (const Complex& z : child.points) {
    out.max_distance = std::max(out.max_distance, hull_signed_distance(hull, z));
  }
  out.ok = out.max_distance <= tol;
  return out;
}

}  // namespace derivroots
