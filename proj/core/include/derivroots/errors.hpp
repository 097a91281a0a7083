#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace derivroots {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input. `field()` names the offending field, using a dotted path
// such as "components[1].weight" when the input is nested.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Evaluation point coincides with a pole (an atom, a root of P).
class PoleError : public Error {
 public:
  PoleError(std::complex<double> where, const std::string& message)
      : Error(message), where_(where) {}
  std::complex<double> where() const noexcept { return where_; }

 private:
  std::complex<double> where_;
};

class AccuracyError : public Error {
 public:
  AccuracyError(double residual, const std::string& message)
      : Error(message + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Problem size exceeds a configured cap.
class ScaleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual,
                   std::vector<std::size_t> unconverged)
      : Error(message), residual_(residual), unconverged_(std::move(unconverged)) {}
  double residual() const noexcept { return residual_; }
  const std::vector<std::size_t>& unconverged() const noexcept { return unconverged_; }

 private:
  double residual_;
  std::vector<std::size_t> unconverged_;
};

class DerivativeVanishesError : public Error {
 public:
  using Error::Error;
};

// A ratio too large to represent safely. `direction()` is the unit complex
// number giving its phase.
class MagnitudeError : public Error {
 public:
  MagnitudeError(std::complex<double> direction, double log2_magnitude)
      : Error("ratio magnitude 2^" + std::to_string(log2_magnitude) +
              " exceeds representable range"),
        direction_(direction),
        log2_magnitude_(log2_magnitude) {}
  std::complex<double> direction() const noexcept { return direction_; }
  double log2_magnitude() const noexcept { return log2_magnitude_; }

 private:
  std::complex<double> direction_;
  double log2_magnitude_;
};

class DegenerateConfigurationError : public Error {
 public:
  using Error::Error;
};

class EmptyPolynomialError : public Error {
 public:
  using Error::Error;
};

// g(a) is too close to 0 for the generic-measure moment predictions.
class GenericMeasureError : public Error {
 public:
  using Error::Error;
};

// A trial failed. Carries what is needed to replay it.
class TrialError : public Error {
 public:
  TrialError(const std::string& message, std::uint64_t seed, std::size_t n, std::size_t trial)
      : Error(message), seed_(seed), n_(n), trial_(trial) {}
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t trial() const noexcept { return trial_; }

 private:
  std::uint64_t seed_;
  std::size_t n_;
  std::size_t trial_;
};

}  // namespace derivroots
