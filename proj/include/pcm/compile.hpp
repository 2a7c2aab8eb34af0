#pragma once

#include <memory>
#include <vector>

#include "pcm/circuit.hpp"

namespace pcm {

// Binary naive Bayes over class C and features X_1..X_n: a class prior and
// per-feature conditionals P(x_i=1 | c), P(x_i=1 | !c).
struct NaiveBayesModel {
  double class_prior = 0.5;
  std::vector<double> theta_given_c;      // one per feature
  std::vector<double> theta_given_not_c;  // one per feature

  std::size_t feature_count() const { return theta_given_c.size(); }
};

struct LinearModel {
  double bias = 0.0;
  std::vector<double> weights;  // one per feature, feature order

  std::size_t feature_count() const { return weights.size(); }
};

struct DatasetTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::uint8_t>> rows;  // binary feature cells, feature order
  std::vector<double> targets;                  // real target column, if any
  std::vector<std::uint8_t> labels;             // binary class column, if any

  std::size_t row_count() const { return rows.size(); }
  std::size_t feature_count() const { return columns.size(); }
};

// Right-linear vtree over (C, X_1..X_n) with the class variable 1 at the top
// and features 2..n+1 in order.
std::shared_ptr<const Vtree> nb_vtree(std::size_t feature_count);

// PC over {C, X_1..X_n} equal to theta_C * prod_i theta_{x_i|C} everywhere;
// alternating and validator-clean by construction.
Circuit nb_to_pc(const NaiveBayesModel& nb);

// Logistic/regression circuit equal to bias + sum_i w_i x_i on the same
// right-linear vtree as nb_to_pc. With include_class the class variable is
// present with all-zero weights, so g(C, x) = g(!C, x).
Circuit lr_to_lc(const LinearModel& lm, bool include_class = true);

// Same construction without the class variable, on an arbitrary vtree whose
// variables are 1..n in feature order.
Circuit linear_to_rc(const LinearModel& lm, std::shared_ptr<const Vtree> vtree);

// Fully factorized PC: evaluate = prod_i (m_i if x_i else 1-m_i); variables
// 1..n in marginal order.
Circuit factorized_to_pc(const std::vector<double>& marginals,
                         std::shared_ptr<const Vtree> vtree);

// Maximum-likelihood counts with Laplace smoothing added to each cell.
NaiveBayesModel fit_naive_bayes(const DatasetTable& data, double laplace);

// Closed-form ridge solution of (X^T X + lambda I) w = X^T y with the
// intercept column unpenalized. Throws QueryError on a singular system.
LinearModel fit_ridge(const DatasetTable& data, double lambda);

}  // namespace pcm
