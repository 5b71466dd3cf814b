#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgmod {

template <class F>
double llr_expectation(double a, F&& f, double y_cut) {
  const double sa = std::sqrt(a);
  if (a <= kHermiteLimit) {
    const auto& rule = normal_rule();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(a + sa * rule.nodes[i]);
    }
    return acc;
  }

  // Panels no wider than 1.5 keep the 16-point rule well inside the
  // analyticity strip of tanh / softplus (poles at Im y = pi/2).
  const double lo = a - 10.0 * sa;
  const double hi = std::min(a + 10.0 * sa, y_cut);
  if (hi <= lo) return 0.0;
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / 1.5));
  const double h = (hi - lo) / static_cast<double>(panels);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * a);
  const auto& gl = legendre_rule();

  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double y = mid + 0.5 * h * gl.nodes[i];
      const double u = y - a;
      panel += gl.weights[i] * f(y) * std::exp(-u * u / (2.0 * a));
    }
    acc += 0.5 * h * panel;
  }
  return acc * norm;
}

}  // namespace sgmod
