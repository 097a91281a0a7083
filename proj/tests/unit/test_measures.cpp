#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "derivroots/errors.hpp"
#include "derivroots/measures.hpp"
#include "oracles.hpp"

using namespace derivroots;
using namespace std::complex_literals;

namespace {

std::string field_of(const MeasureSpec& spec) {
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("single atom samples") {
  const auto xs = sample(make_discrete({0.0}, {1.0}), 5, 1);
  REQUIRE(xs.size() == 5);
  for (Complex x : xs) CHECK(x == Complex(0.0));
}

TEST_CASE("samples lie in the support") {
  for (Complex x : sample(make_circle(0.0, 1.0), 100, 2)) CHECK(std::abs(std::abs(x) - 1.0) <= 1e-12);
  for (Complex x : sample(make_disk({3.0, 0.0}, 0.1), 1000, 3)) CHECK(std::abs(x - 3.0) <= 0.1);
  const MeasureSpec cantor = make_cantor(0.0, 1.0, 1.0 / 3.0);
  for (Complex x : sample(cantor, 1000, 4)) {
    CHECK(x.imag() == 0.0);
    CHECK(x.real() >= 0.0);
    CHECK(x.real() <= 1.0);
    // No mass in the first removed third.
    CHECK(!(x.real() > 1.0 / 3.0 + 1e-12 && x.real() < 2.0 / 3.0 - 1e-12));
    CHECK(in_support(cantor, x, 1e-12));
  }
}

TEST_CASE("mixture frequencies follow the weights") {
  const MeasureSpec mix = make_mixture({{0.9, make_circle(0.0, 1.0)}, {0.1, make_disk(3.0, 0.1)}});
  const auto xs = sample(mix, 10000, 5);
  std::size_t near = 0;
  for (Complex x : xs) near += std::abs(x - 3.0) <= 0.1;
  CHECK(std::abs(near / 1e4 - 0.1) <= 0.01);

  const auto big = sample(mix, 100000, 6);
  near = 0;
  for (Complex x : big) near += std::abs(x - 3.0) <= 0.1;
  const double se = std::sqrt(0.1 * 0.9 / 1e5);
  CHECK(std::abs(near / 1e5 - 0.1) <= 4 * se);
}

TEST_CASE("sampling is deterministic and independent of thread count") {
  const MeasureSpec mix = make_mixture({{0.5, make_cantor(0.0, {1.0, 1.0}, 0.25)}, {0.5, make_disk(0.0, 1.0)}});
  const auto a = sample(mix, 5000, 77, 1);
  const auto b = sample(mix, 5000, 77, 4);
  const auto c = sample(mix, 5000, 77, 1);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a != sample(mix, 5000, 78, 1));
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of(make_circle(0.0, -1.0)) == "radius");
  CHECK(field_of(make_disk(0.0, 0.0)) == "radius");
  CHECK(field_of(make_discrete({0.0, 1.0}, {0.5, 0.4})) == "weights");
  CHECK(field_of(make_discrete({0.0, 1.0}, {1.0, 0.0})) == "weights[1]");
  CHECK(field_of(make_discrete({0.0, 0.0}, {0.5, 0.5})) == "atoms[1]");
  CHECK(field_of(make_cantor(0.0, 1.0, 0.5)) == "ratio");
  CHECK(field_of(make_cantor(1.0, 1.0, 0.3)) == "endpoints");
  CHECK(field_of(make_mixture({{0.6, make_circle(0.0, 1.0)}, {0.3, make_disk(0.0, 1.0)}})) ==
        "components.weight");
  CHECK(field_of(make_mixture({{0.5, make_circle(0.0, 1.0)}, {0.5, make_disk(0.0, -2.0)}})) ==
        "components[1].measure.radius");
  CHECK(field_of(make_mixture({{1.0, make_circle(0.0, 1.0)}, {-0.0, make_disk(0.0, 1.0)}})) ==
        "components[1].weight");
  CHECK(field_of(make_disk(0.0, 1.0)).empty());

  MeasureSpec nested = make_circle(0.0, 1.0);
  for (int depth = 0; depth < 4; ++depth) nested = make_mixture({{1.0, nested}});
  CHECK(field_of(nested).empty());
  nested = make_mixture({{1.0, nested}});
  CHECK_THROWS_AS(validate(nested), ValidationError);
  CHECK_THROWS_AS(sample(make_circle(0.0, 1.0), 0, 1), ValidationError);
}

TEST_CASE("cauchy transform examples") {
  CHECK(cauchy_transform(make_discrete({0.0}, {1.0}), 2.0).value == Complex(0.5));
  CHECK(std::abs(cauchy_transform(make_circle(0.0, 1.0), 2.0).value - 0.5) < 1e-15);
  CHECK(std::abs(cauchy_transform(make_disk(0.0, 1.0), 2.0).value - 0.5) < 1e-15);
  CHECK(std::abs(cauchy_transform_quadrature(make_circle(0.0, 1.0), 2.0).value - 0.5) < 1e-10);
  CHECK(std::abs(cauchy_transform_quadrature(make_disk(0.0, 1.0), 2.0).value - 0.5) < 1e-8);
  CHECK_THROWS_AS(cauchy_transform(make_discrete({0.0, 1.0}, {0.5, 0.5}), 1.0), PoleError);
  CHECK_THROWS_AS(cauchy_transform(make_circle(0.0, 1.0), 1.0 + 1e-9), AccuracyError);
  // Inside the circle the transform vanishes; inside the disk it is conj(z).
  CHECK(cauchy_transform(make_circle(0.0, 1.0), 0.3).value == Complex(0.0));
  CHECK(std::abs(cauchy_transform(make_disk(0.0, 1.0), {0.3, 0.4}).value - Complex(0.3, -0.4)) < 1e-15);
}

TEST_CASE("closed forms agree with quadrature on a grid") {
  const std::vector<MeasureSpec> specs{make_circle({0.5, -0.5}, 1.5), make_disk({-1.0, 0.25}, 0.75),
                                       make_discrete({0.0, 1.0, 1i}, {0.2, 0.3, 0.5})};
  for (const auto& spec : specs) {
    for (int i = 0; i < 20; ++i) {
      const Complex z = std::polar(2.0 + 0.3 * (i % 5), 2 * std::numbers::pi * i / 20.0) + Complex(0.1, 0.2);
      if (support_distance(spec, z) < 0.05) continue;
      const Estimate closed = cauchy_transform(spec, z);
      const Estimate quad = cauchy_transform_quadrature(spec, z);
      CHECK(std::abs(closed.value - quad.value) <= std::max(quad.error, 1e-9 * std::abs(closed.value)));
    }
  }
}

TEST_CASE("cantor transform matches the moment series") {
  const MeasureSpec spec = make_cantor(0.0, 1.0, 1.0 / 3.0);
  for (Complex z : {Complex(2.0, 0.0), Complex(0.5, 1.0), Complex(-0.7, -0.3), Complex(1.2, 0.6)}) {
    const Estimate g = cauchy_transform(spec, z);
    const Complex ref = oracle::cantor_cauchy_series(0.0, 1.0, 1.0 / 3.0, z);
    CHECK(std::abs(g.value - ref) <= 1e-7 * std::abs(ref));
  }
}

TEST_CASE("inverse square moments") {
  // Poisson kernel: E 1/|2 - U|^2 over the unit circle is 1/3.
  CHECK(inverse_square_moment(make_circle(0.0, 1.0), 2.0).value.real() == doctest::Approx(1.0 / 3.0));
  CHECK(inverse_square_moment(make_disk(0.0, 1.0), 2.0).value.real() == doctest::Approx(std::log(4.0 / 3.0)));
  CHECK(std::isinf(inverse_square_moment(make_disk(0.0, 1.0), 0.5).value.real()));
  const Estimate q = expectation(make_disk(0.0, 1.0), [](Complex u) { return Complex(1.0 / std::norm(2.0 - u), 0.0); });
  CHECK(q.value.real() == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-8));
}

TEST_CASE("frostman estimates") {
  const std::vector<Complex> same(100, Complex(0.5, 0.5));
  const std::vector<double> radii{0.5, 0.1, 0.01};
  for (const auto& e : frostman_exponent(same, {0.5, 0.5}, radii)) CHECK(e.estimate == 0.0);

  const auto disk = sample(make_disk(0.0, 1.0), 100000, 8);
  const std::vector<double> r1{0.1};
  CHECK(std::abs(frostman_exponent(disk, 0.0, r1)[0].estimate - 2.0) <= 0.1);

  // On the circle the mass of D(1, r) is 2 asin(r/2) / pi, so the single
  // radius estimate carries a log(1/pi)/log(r) offset; the slope is 1.
  const auto circle = sample(make_circle(0.0, 1.0), 100000, 9);
  const std::vector<double> r2{0.05};
  const double arc = 2.0 * std::asin(0.025) / std::numbers::pi;
  const FrostmanEstimate at = frostman_exponent(circle, 1.0, r2)[0];
  CHECK(std::abs(at.mass - arc) <= 4.0 * std::sqrt(arc / 1e5));
  CHECK(at.estimate == doctest::Approx(std::log(arc) / std::log(0.05)).epsilon(0.02));
  const std::vector<double> r3{0.2, 0.1, 0.05, 0.02};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& e : frostman_exponent(circle, 1.0, r3)) {
    const double x = std::log(e.radius), y = std::log(e.mass);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  CHECK(std::abs((sxy - sx * sy / 4) / (sxx - sx * sx / 4) - 1.0) <= 0.15);

  const std::vector<double> far{0.01};
  CHECK(std::isinf(frostman_exponent(disk, 5.0, far)[0].estimate));

  const std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS(frostman_exponent(disk, 0.0, bad), ValidationError);
  CHECK_THROWS_AS(frostman_exponent(std::vector<Complex>{}, 0.0, r1), ValidationError);
  CHECK(cantor_dimension(1.0 / 3.0) == doctest::Approx(std::log(2.0) / std::log(3.0)));
}

TEST_CASE("density and support helpers") {
  const MeasureSpec mix = make_mixture({{0.5, make_circle(0.0, 1.0)}, {0.5, make_disk(3.0, 0.5)}});
  CHECK(ac_density(mix, 3.0) == doctest::Approx(0.5 / (std::numbers::pi * 0.25)));
  CHECK(ac_density(mix, 0.0) == 0.0);
  CHECK(support_distance(mix, 0.0) == doctest::Approx(1.0));
  CHECK(type_name(mix) == "mixture");
  CHECK(type_name(make_cantor(0.0, 1.0, 0.2)) == "cantor_segment");
}
