#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "derivroots/errors.hpp"
#include "derivroots/measures.hpp"
#include "derivroots/nummelin.hpp"

using namespace derivroots;

namespace {

std::vector<Complex> draw(const PointSampler& sampler, std::size_t n, std::uint64_t seed) {
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(stream_key(seed, i));
    out[i] = sampler(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("split parameters for the unit disk at a = 2") {
  const DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, 2.0);
  CHECK(p.c_a > 0.0);
  CHECK(p.c_a <= 1.0);
  CHECK(p.r_a > 0.0);
  // T_2(D(0,1)) is the disk with center 2/3 and radius 1/3.
  CHECK(std::abs(p.w_a - 2.0 / 3.0) < 1e-15);
  CHECK(p.r_a == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("shrunk radius is capped by r0") {
  const DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, 10.0);
  // r' = min(1, 5) = 1, image disk center 10/99, radius 1/99.
  CHECK(std::abs(p.w_a - 10.0 / 99.0) < 1e-15);
  CHECK(p.r_a == doctest::Approx(0.5 / 99.0));
  CHECK(p.c_a > 0.0);
}

TEST_CASE("invalid split inputs") {
  CHECK_THROWS_AS(nummelin_split(0.0, 1.0, 0.1, 0.0), DegenerateConfigurationError);
  CHECK_THROWS_AS(nummelin_split(0.0, -1.0, 0.1, 2.0), ValidationError);
  CHECK_THROWS_AS(nummelin_split(0.0, 1.0, 1.0, 2.0), ValidationError);
}

TEST_CASE("law of Y dominates the uniform component") {
  const MeasureSpec disk = make_disk(0.0, 1.0);
  for (Complex a : {Complex(2.0), Complex(10.0)}) {
    const DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, a);
    const auto ys = draw(reciprocal_sampler(disk, a), 200000, 31);
    const DominationCheck check = check_domination(p, ys, 20, 3.0);
    CHECK(check.cells_checked > 100);
    CHECK(check.passed);
  }
}

TEST_CASE("domination check catches an overstated constant") {
  DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, 2.0);
  const auto ys = draw(reciprocal_sampler(make_disk(0.0, 1.0), 2.0), 100000, 5);
  p.c_a = 1.0;
  CHECK_FALSE(check_domination(p, ys, 20, 3.0).passed);
}

TEST_CASE("doeblin source from a mixture") {
  const MeasureSpec mix = make_mixture({{0.75, make_circle(0.0, 1.0)}, {0.25, make_disk(3.0, 0.5)}});
  const auto src = doeblin_source(mix);
  REQUIRE(src.has_value());
  CHECK(src->z0 == Complex(3.0));
  CHECK(src->r0 == 0.5);
  CHECK(src->c0 == doctest::Approx(0.25 / (std::numbers::pi * 0.25)));
  CHECK_FALSE(doeblin_source(make_circle(0.0, 1.0)).has_value());
}

TEST_CASE("split sampler with c_a = 1 draws only from the disk") {
  const DoeblinParams p{1.0, {1.0, 1.0}, 0.5};
  const auto draws = split_sampler(p, [](CounterRng&) -> Complex { throw Error("unused"); }, 1000, 3);
  for (const auto& d : draws) {
    CHECK(d.epsilon);
    CHECK(std::abs(d.value - p.w_a) <= p.r_a);
  }
}

TEST_CASE("split sampler Bernoulli rate") {
  const DoeblinParams p{0.3, 0.0, 1.0};
  const auto draws = split_sampler(p, [](CounterRng&) { return Complex(5.0); }, 100000, 4);
  double hits = 0;
  for (const auto& d : draws) hits += d.epsilon;
  CHECK(std::abs(hits / 1e5 - 0.3) <= 0.005);
}

TEST_CASE("split mixture reproduces the direct law of Y") {
  const MeasureSpec disk = make_disk(0.0, 1.0);
  const Complex a = 2.0;
  const DoeblinParams p = nummelin_split(0.0, 1.0, 1.0 / std::numbers::pi, a);
  const auto draws = split_sampler(p, residual_sampler(disk, a, p), 100000, 12);
  std::vector<Complex> mixed;
  for (const auto& d : draws) mixed.push_back(d.value);
  const auto direct = draw(reciprocal_sampler(disk, a), 100000, 13);
  CHECK(ks_distance_2d(mixed, direct) <= 0.02);

  // A larger constant from a mixture source exercises the rejection step.
  const MeasureSpec mix = make_mixture({{0.5, make_circle(0.0, 1.0)}, {0.5, make_disk(0.5, 0.4)}});
  const auto src = doeblin_source(mix);
  REQUIRE(src.has_value());
  const Complex b(1.5, 0.3);
  const DoeblinParams q = nummelin_split(src->z0, src->r0, src->c0, b);
  const auto d2 = split_sampler(q, residual_sampler(mix, b, q), 100000, 14);
  std::vector<Complex> m2;
  for (const auto& d : d2) m2.push_back(d.value);
  CHECK(ks_distance_2d(m2, draw(reciprocal_sampler(mix, b), 100000, 15)) <= 0.02);
}
