#pragma once

#include "pcm/moments.hpp"

namespace pcm {

// sigma^(k)(x) written as a polynomial in s = sigma(x):
// P_0 = s and P_{k+1}(s) = P_k'(s) * s * (1 - s). Coefficients are integers;
// they stay exact in doubles through order ~17 and are correctly rounded
// beyond that.
struct DerivativePolynomial {
  int order = 0;
  std::vector<double> coefficients;  // c_j of s^j, degree order+1

  double evaluate_at_sigma(double s) const;
};

DerivativePolynomial sigmoid_derivative_polynomial(int k);

// k-th derivative of the sigmoid at alpha.
double sigmoid_derivative(int k, double alpha);

enum class AlphaMode { Zero, Mean, Fixed };

struct TaylorOptions {
  int degree = 1;
  AlphaMode mode = AlphaMode::Mean;
  double fixed_alpha = 0.0;
};

// Degree-d series sum_k gamma^(k)(alpha)/k! * M_k(g - alpha) built from the
// given raw moments (which must extend to the requested degree). gamma
// defaults to the sigmoid; a caller-supplied derivative table gamma^(k)(alpha)
// substitutes any other differentiable non-linearity.
double taylor_from_moments(const MomentVector& moments, const TaylorOptions& options,
                           const std::vector<double>* derivative_table = nullptr);

// Convenience entry point on an unconfigured pair.
double taylor_expectation(const Circuit& pc, const Circuit& rc, const TaylorOptions& options);

enum class Task { Regression, Classification };

struct PredictOptions {
  Task task = Task::Regression;
  TaylorOptions taylor;  // classification only
};

// Expected prediction given partial evidence: exact conditional expectation
// for regression, Taylor-approximated conditional sigmoid expectation for
// classification (moments are conditioned first, then the series applied).
double expected_prediction(const Circuit& pc, const Circuit& model, const Evidence& evidence,
                           const PredictOptions& options);

}  // namespace pcm
