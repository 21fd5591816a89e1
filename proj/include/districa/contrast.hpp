#ifndef DISTRICA_CONTRAST_HPP
#define DISTRICA_CONTRAST_HPP

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <string_view>

#include "districa/error.hpp"
#include "districa/types.hpp"

namespace districa {

enum class ContrastKind { LogCosh, NegExp };

inline std::string_view to_string(ContrastKind kind) {
  return kind == ContrastKind::LogCosh ? "logcosh" : "negexp";
}

inline ContrastKind parse_contrast(std::string_view name) {
  if (name == "logcosh") return ContrastKind::LogCosh;
  if (name == "negexp") return ContrastKind::NegExp;
  throw Error(ErrorKind::Config, "unknown contrast '" + std::string(name) + "'");
}

/// Non-Gaussianity contrast F with its first two derivatives.
///   LogCosh: F = log cosh x,     F' = tanh x,          F'' = 1 - tanh² x
///   NegExp:  F = -exp(-x²/2),    F' = x exp(-x²/2),    F'' = (1 - x²) exp(-x²/2)
struct ContrastFunction {
  ContrastKind kind = ContrastKind::LogCosh;

  template <typename Scalar>
  Scalar value(Scalar x) const {
    using std::abs, std::exp, std::log1p, std::log;
    if (kind == ContrastKind::LogCosh) {
      const Scalar a = abs(x);
      return a + log1p(exp(Scalar(-2) * a)) - Scalar(std::log(2.0));
    }
    return -exp(-x * x / Scalar(2));
  }

  template <typename Scalar>
  Scalar first(Scalar x) const {
    using std::tanh, std::exp;
    if (kind == ContrastKind::LogCosh) return tanh(x);
    return x * exp(-x * x / Scalar(2));
  }

  template <typename Scalar>
  Scalar second(Scalar x) const {
    using std::tanh, std::exp;
    if (kind == ContrastKind::LogCosh) {
      const Scalar t = tanh(x);
      return Scalar(1) - t * t;
    }
    return (Scalar(1) - x * x) * exp(-x * x / Scalar(2));
  }
};

namespace detail {

inline double hermite_expectation(const ContrastFunction& f, int nodes) {
  // Golub-Welsch for the probabilists' Hermite weight exp(-x²/2).
  VectorXd diag = VectorXd::Zero(nodes);
  VectorXd sub(nodes - 1);
  for (int k = 1; k < nodes; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  require(solver.info() == Eigen::Success, ErrorKind::NumericalFailure,
          "Gauss-Hermite node computation failed");
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double v = solver.eigenvectors()(0, i);
    sum += v * v * f.value(solver.eigenvalues()(i));
  }
  return sum;
}

}  // namespace detail

inline constexpr int kBaselineQuadratureNodes = 256;

/// E[F(ν)] for ν ~ N(0,1), by Gauss-Hermite quadrature. Computed once per kind.
inline double gaussian_baseline(ContrastKind kind) {
  static const double log_cosh =
      detail::hermite_expectation(ContrastFunction{ContrastKind::LogCosh}, kBaselineQuadratureNodes);
  static const double neg_exp =
      detail::hermite_expectation(ContrastFunction{ContrastKind::NegExp}, kBaselineQuadratureNodes);
  return kind == ContrastKind::LogCosh ? log_cosh : neg_exp;
}

}  // namespace districa

#endif  // DISTRICA_CONTRAST_HPP
