#pragma once

#include <cstddef>
#include <vector>

namespace sgmod {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss rule for E[f(xi)], xi ~ N(0,1). Weights sum to one.
QuadratureRule gauss_hermite_normal(std::size_t n);

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Shared 200-node standard-normal rule, built once.
const QuadratureRule& normal_rule();

/// Shared 16-node Legendre rule, built once.
const QuadratureRule& legendre_rule();

/**
 * E[f(a + sqrt(a) * xi)] for xi ~ N(0,1), i.e. the expectation of f over the
 * halved LLR of a BPSK symbol at SNR a.
 *
 * For a <= kHermiteLimit the 200-node Hermite rule is used directly. Above
 * that the integrand's transition near y = 0 becomes narrow compared with the
 * Hermite node spacing, so the expectation is integrated in y with composite
 * Gauss-Legendre panels over [a - 10 sqrt(a), min(a + 10 sqrt(a), y_cut)].
 * f must be negligible (below ~1e-20 of its scale) for y > y_cut.
 */
template <class F>
double llr_expectation(double a, F&& f, double y_cut);

inline constexpr double kHermiteLimit = 1.5;

}  // namespace sgmod

#include "sgmod/quadrature_impl.hpp"
