#include "pcm/taylor.hpp"

#include <algorithm>
#include <cmath>

#include "pcm/errors.hpp"

namespace pcm {

double DerivativePolynomial::evaluate_at_sigma(double s) const {
  double acc = 0.0;
  for (std::size_t j = coefficients.size(); j-- > 0;) acc = acc * s + coefficients[j];
  return acc;
}

DerivativePolynomial sigmoid_derivative_polynomial(int k) {
  if (k < 0) throw QueryError("derivative order must be nonnegative");
  DerivativePolynomial p;
  p.order = 0;
  p.coefficients = {0.0, 1.0};  // P_0 = s
  for (int i = 0; i < k; ++i) {
    // derivative
    std::vector<double> d(p.coefficients.size() - 1, 0.0);
    for (std::size_t j = 1; j < p.coefficients.size(); ++j)
      d[j - 1] = static_cast<double>(j) * p.coefficients[j];
    // times s - s^2
    std::vector<double> next(d.size() + 2, 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      next[j + 1] += d[j];
      next[j + 2] -= d[j];
    }
    p.coefficients = std::move(next);
    ++p.order;
  }
  return p;
}

double sigmoid_derivative(int k, double alpha) {
  return sigmoid_derivative_polynomial(k).evaluate_at_sigma(sigmoid(alpha));
}

double taylor_from_moments(const MomentVector& moments, const TaylorOptions& options,
                           const std::vector<double>* derivative_table) {
  int d = options.degree;
  if (d < 0) throw QueryError("Taylor degree must be nonnegative");
  if (d > kMaxMomentOrder)
    throw QueryError("Taylor degree exceeds the exact binomial table (degree <= 60)");
  if (moments.order() < d) throw QueryError("moment vector shorter than Taylor degree");
  if (derivative_table && static_cast<int>(derivative_table->size()) < d + 1)
    throw QueryError("derivative table shorter than Taylor degree");

  double alpha = 0.0;
  switch (options.mode) {
    case AlphaMode::Zero:
      break;
    case AlphaMode::Mean:
      if (moments.order() < 1) throw QueryError("mean centering needs the first moment");
      alpha = moments[1] / moments[0];
      break;
    case AlphaMode::Fixed:
      alpha = options.fixed_alpha;
      break;
  }

  MomentVector centered = shifted_moments(moments, alpha);
  double total = 0.0;
  double factorial = 1.0;
  for (int t = 0; t <= d; ++t) {
    if (t > 0) factorial *= t;
    double deriv = derivative_table ? (*derivative_table)[t] : sigmoid_derivative(t, alpha);
    total += deriv / factorial * centered[t];
  }
  return total;
}

namespace {

int moment_order_for(const TaylorOptions& options) {
  return options.mode == AlphaMode::Mean ? std::max(options.degree, 1) : options.degree;
}

}  // namespace

double taylor_expectation(const Circuit& pc, const Circuit& rc, const TaylorOptions& options) {
  PairCache cache;
  MomentVector m = mc2_moments(pc, rc, moment_order_for(options), cache);
  return taylor_from_moments(m, options);
}

double expected_prediction(const Circuit& pc, const Circuit& model, const Evidence& evidence,
                           const PredictOptions& options) {
  if (options.task == Task::Regression) return conditional_moments(pc, model, evidence, 1)[1];
  MomentVector m = conditional_moments(pc, model, evidence, moment_order_for(options.taylor));
  return taylor_from_moments(m, options.taylor);
}

}  // namespace pcm
