#include "sgmod/core_math.hpp"

#include "sgmod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgmod {
namespace {

constexpr double kRootWidth = 1e-12;

// 1 - tanh(y) without cancellation for large y.
double one_minus_tanh(double y) { return 2.0 / (1.0 + std::exp(2.0 * y)); }

// log2(1 + e^{-2y}): the per-sample information loss of BPSK at halved LLR y.
double bpsk_loss_bits(double y) {
  const double v = -2.0 * y;
  const double sp = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  return sp / std::numbers::ln2;
}

// 1 - log2(1 + e^{-2y}), accurate when the result is small.
double bpsk_info_bits(double y) {
  const double u = 2.0 * y;
  if (std::abs(u) < 1.0) return -std::log1p(0.5 * std::expm1(-u)) / std::numbers::ln2;
  return 1.0 - bpsk_loss_bits(y);
}

}  // namespace

double mse_g(double a) {
  if (std::isnan(a) || a < 0.0) throw DomainError("mse_g: SINR must be nonnegative");
  if (a == 0.0) return 1.0;
  if (a >= kMseCutoff) return 0.0;
  return llr_expectation(a, [](double y) { const double e = one_minus_tanh(y); return e * e; }, 30.0);
}

double mse_g(Snr a) { return mse_g(a.value()); }

double biawgn_capacity(double gamma) {
  if (std::isnan(gamma) || gamma < 0.0) throw DomainError("biawgn_capacity: SNR must be nonnegative");
  if (gamma == 0.0) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  double c;
  if (gamma <= kHermiteLimit) {
    c = llr_expectation(gamma, bpsk_info_bits, kInf);
  } else {
    c = 1.0 - llr_expectation(gamma, bpsk_loss_bits, 40.0);
  }
  return std::clamp(c, 0.0, 1.0);
}

CapacityValue biawgn_capacity(Snr gamma) { return CapacityValue(biawgn_capacity(gamma.value())); }

Snr biawgn_capacity_inverse(CapacityValue rate) {
  const double r = rate.bits();
  if (r >= 1.0) throw DomainError("biawgn_capacity_inverse: rate must be below 1 bit");
  if (r == 0.0) return Snr(0.0);
  double hi = 1.0;
  while (biawgn_capacity(hi) <= r) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("biawgn_capacity_inverse: rate too close to 1");
  }
  return Snr(bisect_boundary(0.0, hi, kRootWidth, [r](double g) { return biawgn_capacity(g) < r; }));
}

CapacityValue awgn_capacity_fixed_point(EbN0 ebn0) {
  const double e = ebn0.ratio();
  if (e <= std::numbers::ln2) return CapacityValue(0.0);
  const auto excess = [e](double c) { return 0.5 * std::log2(1.0 + 2.0 * c * e) - c; };
  double hi = 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;
  return CapacityValue(bisect_boundary(0.0, hi, kRootWidth, [&](double c) { return excess(c) > 0.0; }));
}

double awgn_ebn0_for_rate(double rate_bits) {
  if (!(rate_bits > 0.0)) throw DomainError("awgn_ebn0_for_rate: rate must be positive");
  return std::expm1(2.0 * rate_bits * std::numbers::ln2) / (2.0 * rate_bits);
}

}  // namespace sgmod
