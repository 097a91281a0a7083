#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace derivroots {

// Counter-based generator: the i-th output of a stream is a pure function of
// (key, i). Streams are cheap to create, so every sample, trial, and solver
// gets its own, and results never depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return at(key_, counter_++); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on (0, 1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }
  double normal() noexcept;
  // Standard complex Gaussian: E|z|^2 = 1.
  std::complex<double> complex_normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t at(std::uint64_t key, std::uint64_t counter) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Stream key for child `index` of `parent`.
std::uint64_t stream_key(std::uint64_t parent, std::uint64_t index) noexcept;

// Documented seed derivation: FNV-1a of `tag`, folded with the user seed and
// each index through mix64. Used for every (seed, role, n, trial) stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices = {}) noexcept;

}  // namespace derivroots
