#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "derivroots/parallel.hpp"
#include "derivroots/rng.hpp"

using namespace derivroots;

TEST_CASE("counter rng is a pure function of key and counter") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CounterRng c(42, 50);
  CounterRng d(42);
  for (int i = 0; i < 50; ++i) d();
  CHECK(c() == d());
  CHECK(CounterRng::at(42, 7) == CounterRng(42, 7)());
}

TEST_CASE("uniform draws stay in range and have the right mean") {
  CounterRng rng(9);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(rng.uniform_open_zero() > 0.0);
}

TEST_CASE("complex normal has unit second moment") {
  CounterRng rng(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += std::norm(rng.complex_normal());
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derived seeds separate tags and indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    seen.insert(derive_seed(s, "roots"));
    seen.insert(derive_seed(s, "solver"));
    seen.insert(derive_seed(s, "trial", {1, 2}));
    seen.insert(derive_seed(s, "trial", {2, 1}));
  }
  CHECK(seen.size() == 80);
  CHECK(derive_seed(5, "roots") == derive_seed(5, "roots"));
  CHECK(stream_key(1, 2) != stream_key(2, 1));
}

TEST_CASE("parallel_for visits every index once") {
  for (unsigned threads : {1u, 2u, 4u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) REQUIRE(h.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (unsigned threads : {1u, 3u}) {
    try {
      parallel_for(100, threads, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}

TEST_CASE("default thread count is positive") { CHECK(default_thread_count() >= 1); }
