#include "derivroots/rng.hpp"

#include <cmath>
#include <numbers>

namespace derivroots {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // Stafford variant 13 finalizer (as in SplitMix64).
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t CounterRng::at(std::uint64_t key, std::uint64_t counter) noexcept {
  constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  const std::uint64_t x = mix64(key ^ mix64((counter + 1) * kGamma));
  return mix64(x + key * kGamma);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> CounterRng::complex_normal() noexcept {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  // |z|^2 ~ Exp(1), uniform phase.
  const double radius = std::sqrt(-std::log(u1));
  return std::polar(radius, 2.0 * std::numbers::pi * u2);
}

std::uint64_t stream_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t key = mix64(seed ^ mix64(h));
  for (std::uint64_t index : indices) key = stream_key(key, index);
  return key;
}

}  // namespace derivroots
