#pragma once

#include "sgmod/types.hpp"

namespace sgmod {

/// Above this SINR mse_g returns exactly 0 (the true value is below 3e-12).
inline constexpr double kMseCutoff = 50.0;

/// Bit MSE of the tanh conditional-mean estimate at SINR a:
/// g(a) = E[(1 - tanh(a + xi sqrt(a)))^2], xi ~ N(0,1).
/// g(0) = 1, g(inf) = 0, strictly decreasing in between.
double mse_g(Snr a);

/// Same as mse_g(Snr) on a raw extended real; throws DomainError for a < 0.
double mse_g(double a);

/// Mutual information of BPSK over the real AWGN channel at SNR gamma, in bits.
CapacityValue biawgn_capacity(Snr gamma);
double biawgn_capacity(double gamma);

/// SNR at which the BIAWGN channel has the given capacity; rate in [0, 1).
Snr biawgn_capacity_inverse(CapacityValue rate);

/// Positive root of C = 1/2 log2(1 + 2 C Eb/N0); 0 at or below Eb/N0 = ln 2.
CapacityValue awgn_capacity_fixed_point(EbN0 ebn0);

/// Minimum Eb/N0 (linear) at which the real AWGN channel supports rate C.
double awgn_ebn0_for_rate(double rate_bits);

/// Bisection on a monotone predicate: returns the boundary between lo (pred
/// true) and hi (pred false) once the bracket is narrower than width.
template <class Pred>
double bisect_boundary(double lo, double hi, double width, Pred&& pred) {
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace sgmod
