#pragma once

// Reference values computed independently of the library's quadrature:
// adaptive Gauss-Kronrod integration over the LLR density.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace oracle {

/// E[f(y)], y ~ N(a, a), by adaptive 61-point Gauss-Kronrod over a +- 14 sqrt(a).
template <class F>
double llr_mean(double a, F f) {
  const double sd = std::sqrt(a);
  auto integrand = [&](double y) {
    const double u = (y - a) / sd;
    return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi)) * f(y);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a - 14.0 * sd, a + 14.0 * sd, 20,
                                                                        1e-15, &err);
}

inline double mse(double a) {
  return llr_mean(a, [](double y) {
    // (1 - tanh y)^2 = (2 / (1 + e^{2y}))^2
    const double v = 2.0 / (1.0 + std::exp(2.0 * y));
    return v * v;
  });
}

inline double biawgn(double gamma) {
  return 1.0 - llr_mean(gamma, [](double y) {
           return y > 0 ? std::log1p(std::exp(-2.0 * y)) / std::numbers::ln2
                        : (-2.0 * y + std::log1p(std::exp(2.0 * y))) / std::numbers::ln2;
         });
}

}  // namespace oracle
