#include "pcm/compile.hpp"

#include <cmath>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

struct Builder {
  std::vector<CircuitNode> nodes;

  NodeId literal(VarId var, bool positive, NodeId vtree_node) {
    CircuitNode n;
    n.kind = NodeKind::Literal;
    n.var = var;
    n.positive = positive;
    n.vtree_node = vtree_node;
    nodes.push_back(std::move(n));
    return static_cast<NodeId>(nodes.size() - 1);
  }

  NodeId and_gate(NodeId left, NodeId right, NodeId vtree_node) {
    CircuitNode n;
    n.kind = NodeKind::And;
    n.left = left;
    n.right = right;
    n.vtree_node = vtree_node;
    nodes.push_back(std::move(n));
    return static_cast<NodeId>(nodes.size() - 1);
  }

  NodeId or_gate(std::vector<NodeId> children, std::vector<double> weights, NodeId vtree_node) {
    CircuitNode n;
    n.kind = NodeKind::Or;
    n.children = std::move(children);
    n.weights = std::move(weights);
    n.vtree_node = vtree_node;
    nodes.push_back(std::move(n));
    return static_cast<NodeId>(nodes.size() - 1);
  }

  // OR gate over both polarities of the vtree leaf's variable.
  NodeId leaf_or(const Vtree& vt, NodeId leaf, double w_pos, double w_neg) {
    VarId var = vt.node(leaf).var;
    NodeId pos = literal(var, true, leaf);
    NodeId neg = literal(var, false, leaf);
    return or_gate({pos, neg}, {w_pos, w_neg}, leaf);
  }
};

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw QueryError(std::string(what) + " outside [0, 1]");
}

// Feature chain of a naive Bayes branch under vtree node v, with conditionals
// indexed parallel to the leaf order under v. Pass-through OR gates keep the
// alternation between gate layers.
NodeId nb_chain(Builder& b, const Vtree& vt, NodeId v, const std::vector<double>& cond,
                std::size_t index) {
  if (vt.node(v).leaf) {
    double t = cond[index];
    return b.leaf_or(vt, v, t, 1.0 - t);
  }
  NodeId left = nb_chain(b, vt, vt.node(v).left, cond, index);
  NodeId rest = nb_chain(b, vt, vt.node(v).right, cond, index + 1);
  NodeId a = b.and_gate(left, rest, v);
  return b.or_gate({a}, {1.0}, v);
}

}  // namespace

std::shared_ptr<const Vtree> nb_vtree(std::size_t feature_count) {
  std::vector<VarId> order(feature_count + 1);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<VarId>(i + 1);
  return Vtree::right_linear(order);
}

Circuit nb_to_pc(const NaiveBayesModel& nb) {
  if (nb.feature_count() == 0) throw QueryError("naive Bayes model has no features");
  check_probability(nb.class_prior, "class prior");
  for (double t : nb.theta_given_c) check_probability(t, "feature conditional");
  for (double t : nb.theta_given_not_c) check_probability(t, "feature conditional");
  if (nb.theta_given_c.size() != nb.theta_given_not_c.size())
    throw QueryError("conditional tables differ in length");

  auto vt = nb_vtree(nb.feature_count());
  NodeId root_v = vt->root();
  NodeId class_leaf = vt->node(root_v).left;
  NodeId features_v = vt->node(root_v).right;

  Builder b;
  // Class-selector OR gates put all weight on one polarity; the zero edge
  // keeps the gate smooth while killing the other branch's output.
  NodeId sel_c = b.leaf_or(*vt, class_leaf, 1.0, 0.0);
  NodeId chain_c = nb_chain(b, *vt, features_v, nb.theta_given_c, 0);
  NodeId branch_c = b.and_gate(sel_c, chain_c, root_v);

  NodeId sel_not_c = b.leaf_or(*vt, class_leaf, 0.0, 1.0);
  NodeId chain_not_c = nb_chain(b, *vt, features_v, nb.theta_given_not_c, 0);
  NodeId branch_not_c = b.and_gate(sel_not_c, chain_not_c, root_v);

  NodeId root = b.or_gate({branch_c, branch_not_c}, {nb.class_prior, 1.0 - nb.class_prior},
                          root_v);
  return Circuit(vt, std::move(b.nodes), root, CircuitRole::Generative);
}

namespace {

// Weighted chain for linear models: leaf OR gates carry (w_i, 0), structural
// gates carry 0.
NodeId linear_chain(Builder& b, const Vtree& vt, NodeId v,
                    const std::vector<double>& weight_of_var) {
  if (vt.node(v).leaf) {
    VarId var = vt.node(v).var;
    double w = var < weight_of_var.size() ? weight_of_var[var] : 0.0;
    return b.leaf_or(vt, v, w, 0.0);
  }
  NodeId left = linear_chain(b, vt, vt.node(v).left, weight_of_var);
  NodeId right = linear_chain(b, vt, vt.node(v).right, weight_of_var);
  NodeId a = b.and_gate(left, right, v);
  return b.or_gate({a}, {0.0}, v);
}

Circuit linear_on_vtree(const LinearModel& lm, std::shared_ptr<const Vtree> vt,
                        const std::vector<double>& weight_of_var) {
  for (double w : lm.weights)
    if (!std::isfinite(w)) throw QueryError("non-finite linear weight");
  if (!std::isfinite(lm.bias)) throw QueryError("non-finite bias");
  Builder b;
  NodeId top = linear_chain(b, *vt, vt->root(), weight_of_var);
  return Circuit(vt, std::move(b.nodes), top, CircuitRole::Discriminative, lm.bias);
}

}  // namespace

Circuit lr_to_lc(const LinearModel& lm, bool include_class) {
  if (include_class) {
    auto vt = nb_vtree(lm.feature_count());
    std::vector<double> weight_of_var(lm.feature_count() + 2, 0.0);
    for (std::size_t i = 0; i < lm.weights.size(); ++i) weight_of_var[i + 2] = lm.weights[i];
    return linear_on_vtree(lm, vt, weight_of_var);  // class variable 1 stays at weight 0
  }
  std::vector<VarId> order(lm.feature_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<VarId>(i + 1);
  return linear_to_rc(lm, Vtree::right_linear(order));
}

Circuit linear_to_rc(const LinearModel& lm, std::shared_ptr<const Vtree> vtree) {
  if (vtree->var_count() != lm.feature_count())
    throw QueryError("vtree variable count does not match weight count");
  std::vector<double> weight_of_var(lm.feature_count() + 1, 0.0);
  for (std::size_t i = 0; i < lm.weights.size(); ++i) weight_of_var[i + 1] = lm.weights[i];
  return linear_on_vtree(lm, std::move(vtree), weight_of_var);
}

namespace {

NodeId factorized_chain(Builder& b, const Vtree& vt, NodeId v,
                        const std::vector<double>& marginals) {
  if (vt.node(v).leaf) {
    VarId var = vt.node(v).var;
    double m = marginals[var - 1];
    return b.leaf_or(vt, v, m, 1.0 - m);
  }
  NodeId left = factorized_chain(b, vt, vt.node(v).left, marginals);
  NodeId right = factorized_chain(b, vt, vt.node(v).right, marginals);
  NodeId a = b.and_gate(left, right, v);
  return b.or_gate({a}, {1.0}, v);
}

}  // namespace

Circuit factorized_to_pc(const std::vector<double>& marginals,
                         std::shared_ptr<const Vtree> vtree) {
  if (vtree->var_count() != marginals.size())
    throw QueryError("vtree variable count does not match marginal count");
  for (double m : marginals) check_probability(m, "marginal");
  Builder b;
  NodeId top = factorized_chain(b, *vtree, vtree->root(), marginals);
  return Circuit(std::move(vtree), std::move(b.nodes), top, CircuitRole::Generative);
}

NaiveBayesModel fit_naive_bayes(const DatasetTable& data, double laplace) {
  if (data.labels.size() != data.row_count())
    throw QueryError("naive Bayes fitting needs a class column");
  const std::size_t n = data.feature_count();
  double pos = 0;
  std::vector<double> on_pos(n, 0.0), on_neg(n, 0.0);
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    bool c = data.labels[r] != 0;
    if (c) ++pos;
    for (std::size_t j = 0; j < n; ++j) {
      if (data.rows[r][j]) (c ? on_pos : on_neg)[j] += 1.0;
    }
  }
  double neg = static_cast<double>(data.row_count()) - pos;

  auto smoothed = [&](double hits, double total) {
    double denom = total + 2.0 * laplace;
    return denom > 0.0 ? (hits + laplace) / denom : 0.5;
  };

  NaiveBayesModel out;
  out.class_prior = smoothed(pos, pos + neg);
  out.theta_given_c.resize(n);
  out.theta_given_not_c.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.theta_given_c[j] = smoothed(on_pos[j], pos);
    out.theta_given_not_c[j] = smoothed(on_neg[j], neg);
  }
  return out;
}

LinearModel fit_ridge(const DatasetTable& data, double lambda) {
  if (data.targets.size() != data.row_count())
    throw QueryError("ridge fitting needs a target column");
  const std::size_t n = data.feature_count();
  const std::size_t d = n + 1;  // intercept first

  // Normal equations, dense; intercept row/column unpenalized.
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  std::vector<double> rhs(d, 0.0);
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    std::vector<double> x(d, 1.0);
    for (std::size_t j = 0; j < n; ++j) x[j + 1] = data.rows[r][j];
    for (std::size_t i = 0; i < d; ++i) {
      rhs[i] += x[i] * data.targets[r];
      for (std::size_t j = 0; j < d; ++j) a[i][j] += x[i] * x[j];
    }
  }
  for (std::size_t i = 1; i < d; ++i) a[i][i] += lambda;

  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-10)
      throw QueryError("singular normal equations; try lambda > 0");
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < d; ++r) {
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < d; ++j) a[r][j] -= f * a[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> w(d, 0.0);
  for (std::size_t i = d; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t j = i + 1; j < d; ++j) acc -= a[i][j] * w[j];
    w[i] = acc / a[i][i];
  }

  LinearModel out;
  out.bias = w[0];
  out.weights.assign(w.begin() + 1, w.end());
  return out;
}

}  // namespace pcm
