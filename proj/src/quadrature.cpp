#include "sgmod/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace sgmod {
namespace {

// Orthonormal three-term recurrence x p_k = b_{k+1} p_{k+1} + b_k p_{k-1}
// (zero diagonal: both weights used here are symmetric). Returns the sum of
// p_k(x)^2 for k < n and p_n, p_n' for Newton polishing.
struct RecurrenceEval {
  double christoffel;
  double pn;
  double dpn;
};

template <class OffDiag>
RecurrenceEval evaluate(double x, std::size_t n, OffDiag&& b) {
  double p_prev = 0.0, p = 1.0;
  double d_prev = 0.0, d = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += p * p;
    const double bk = (k == 0) ? 0.0 : b(k);
    const double bn = b(k + 1);
    const double p_next = (x * p - bk * p_prev) / bn;
    const double d_next = (p + x * d - bk * d_prev) / bn;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {sum, p, d};
}

template <class OffDiag>
QuadratureRule golub_welsch(std::size_t n, double total_mass, OffDiag&& b) {
  if (n == 0) throw std::invalid_argument("quadrature rule needs at least one node");

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = b(k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 2; ++it) {
      const auto e = evaluate(x, n, b);
      if (e.dpn != 0.0 && std::isfinite(e.dpn)) x -= e.pn / e.dpn;
    }
    rule.nodes[i] = x;
    rule.weights[i] = total_mass / evaluate(x, n, b).christoffel;
  }
  // Symmetrize: removes the last-ulp asymmetry left by the eigen solver.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite_normal(std::size_t n) {
  return golub_welsch(n, 1.0, [](std::size_t k) { return std::sqrt(static_cast<double>(k)); });
}

QuadratureRule gauss_legendre(std::size_t n) {
  return golub_welsch(n, 2.0, [](std::size_t k) {
    const double kk = static_cast<double>(k);
    return kk / std::sqrt(4.0 * kk * kk - 1.0);
  });
}

const QuadratureRule& normal_rule() {
  static const QuadratureRule rule = gauss_hermite_normal(200);
  return rule;
}

const QuadratureRule& legendre_rule() {
  static const QuadratureRule rule = gauss_legendre(16);
  return rule;
}

}  // namespace sgmod
