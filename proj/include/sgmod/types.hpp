#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sgmod {

/// Argument outside the mathematical domain of a function (negative SNR, rate >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid user-supplied configuration (grid, window, sizes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical invariant was violated during a computation.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nonnegative extended-real SINR. +infinity is a legal, explicit value
/// (a packet that is known or already decoded).
class Snr {
 public:
  constexpr Snr() = default;
  explicit Snr(double v) : value_(v) {
    if (std::isnan(v) || v < 0.0) {
      throw DomainError("Snr must be nonnegative, got " + std::to_string(v));
    }
  }
  static Snr infinity() { return Snr(kInf); }

  double value() const { return value_; }
  bool is_infinite() const { return std::isinf(value_); }

  friend bool operator==(Snr a, Snr b) { return a.value_ == b.value_; }
  friend auto operator<=>(Snr a, Snr b) { return a.value_ <=> b.value_; }

 private:
  double value_ = 0.0;
};

/// Spectral efficiency or code rate in bits per real channel dimension.
class CapacityValue {
 public:
  constexpr CapacityValue() = default;
  explicit CapacityValue(double bits) : bits_(bits) {
    if (std::isnan(bits) || bits < 0.0) {
      throw DomainError("capacity must be nonnegative, got " + std::to_string(bits));
    }
  }
  double bits() const { return bits_; }

  friend bool operator==(CapacityValue a, CapacityValue b) { return a.bits_ == b.bits_; }
  friend auto operator<=>(CapacityValue a, CapacityValue b) { return a.bits_ <=> b.bits_; }

 private:
  double bits_ = 0.0;
};

/// Energy per information bit over noise spectral density, linear scale.
class EbN0 {
 public:
  explicit EbN0(double ratio) : ratio_(ratio) {
    if (!(ratio > 0.0)) {
      throw DomainError("Eb/N0 must be positive, got " + std::to_string(ratio));
    }
  }
  static EbN0 from_db(double db) { return EbN0(std::pow(10.0, db / 10.0)); }

  double ratio() const { return ratio_; }
  double db() const { return 10.0 * std::log10(ratio_); }

 private:
  double ratio_;
};

}  // namespace sgmod
