#include "pcm/moments.hpp"

#include <cmath>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

// Pascal's triangle in unsigned 64-bit integers; every C(n<=60, k) fits.
const std::vector<std::vector<double>>& binomial_table() {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<std::uint64_t>> t(kMaxMomentOrder + 1);
    for (int n = 0; n <= kMaxMomentOrder; ++n) {
      t[n].resize(n + 1, 1);
      for (int k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
    }
    std::vector<std::vector<double>> d(t.size());
    for (std::size_t n = 0; n < t.size(); ++n) d[n].assign(t[n].begin(), t[n].end());
    return d;
  }();
  return table;
}

}  // namespace

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > kMaxMomentOrder)
    throw QueryError("binomial coefficient outside the exact 64-bit table (order <= 60)");
  return binomial_table()[n][k];
}

void PairCache::clear() {
  prob_table_.clear();
  exp_table_.clear();
  moment_table_.clear();
  prob_stats_ = exp_stats_ = moment_stats_ = Stats{};
}

// Walks a PC/RC pair sharing a vtree. Literal-vs-literal base cases are
// evaluated inline; every pair involving a gate is memoized.
class PairTraversal {
 public:
  PairTraversal(const Circuit& pc, const Circuit& rc, const std::vector<double>* leaf_mask,
                PairCache& cache)
      : pc_(pc), rc_(rc), mask_(leaf_mask), cache_(cache) {
    if (pc.role() != CircuitRole::Generative) throw QueryError("first circuit must be generative");
    if (rc.role() != CircuitRole::Discriminative)
      throw QueryError("second circuit must be discriminative");
    if (!Vtree::structurally_equal(pc.vtree(), rc.vtree()))
      throw QueryError("circuits do not share a vtree");
    if (!is_alternating(pc) || !is_alternating(rc))
      throw QueryError("non-alternating input; run normalize first");
  }

  double prob(NodeId n, NodeId m) {
    check_vtree_match(n, m);
    const CircuitNode& pn = pc_.node(n);
    const CircuitNode& rm = rc_.node(m);
    if (pn.kind == NodeKind::Literal && rm.kind == NodeKind::Literal)
      return literal_prob(pn, rm, n);

    ++cache_.prob_stats_.lookups;
    auto key = PairCache::key(n, m);
    if (auto it = cache_.prob_table_.find(key); it != cache_.prob_table_.end()) return it->second;
    ++cache_.prob_stats_.computed;

    double value = 0.0;
    if (rm.kind == NodeKind::Literal) {
      // PC gate over a single variable vs an RC literal.
      require(pn.kind == NodeKind::Or, n, m);
      for (std::size_t i = 0; i < pn.children.size(); ++i)
        value += pn.weights[i] * literal_prob(pc_.node(pn.children[i]), rm, pn.children[i]);
    } else if (pn.kind == NodeKind::Literal) {
      // PC literal vs an RC gate over the same single variable.
      require(rm.kind == NodeKind::Or, n, m);
      for (NodeId c : rm.children)
        value += literal_prob(pn, rc_.node(c), n);
    } else if (pn.kind == NodeKind::Or && rm.kind == NodeKind::Or) {
      for (std::size_t i = 0; i < pn.children.size(); ++i) {
        double inner = 0.0;
        for (NodeId j : rm.children) inner += prob(pn.children[i], j);
        value += pn.weights[i] * inner;
      }
    } else if (pn.kind == NodeKind::And && rm.kind == NodeKind::And) {
      value = prob(pn.left, rm.left) * prob(pn.right, rm.right);
    } else {
      mismatch(n, m);
    }
    cache_.prob_table_.emplace(key, value);
    return value;
  }

  // First-order recursion: expectation of 1_m * g_m under p_n.
  double expectation(NodeId n, NodeId m) {
    check_vtree_match(n, m);
    const CircuitNode& pn = pc_.node(n);
    const CircuitNode& rm = rc_.node(m);
    if (rm.kind == NodeKind::Literal) return 0.0;  // g of a literal is 0

    ++cache_.exp_stats_.lookups;
    auto key = PairCache::key(n, m);
    if (auto it = cache_.exp_table_.find(key); it != cache_.exp_table_.end()) return it->second;
    ++cache_.exp_stats_.computed;

    double value = 0.0;
    if (pn.kind == NodeKind::Literal && rm.kind == NodeKind::Or) {
      // phi of the edge the PC literal entails, scaled by its mask.
      for (std::size_t j = 0; j < rm.children.size(); ++j)
        value += rm.weights[j] * literal_prob(pn, rc_.node(rm.children[j]), n);
    } else if (pn.kind == NodeKind::Or && rm.kind == NodeKind::Or) {
      for (std::size_t i = 0; i < pn.children.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < rm.children.size(); ++j) {
          NodeId cj = rm.children[j];
          inner += expectation(pn.children[i], cj) + rm.weights[j] * prob(pn.children[i], cj);
        }
        value += pn.weights[i] * inner;
      }
    } else if (pn.kind == NodeKind::And && rm.kind == NodeKind::And) {
      value = prob(pn.left, rm.left) * expectation(pn.right, rm.right) +
              prob(pn.right, rm.right) * expectation(pn.left, rm.left);
    } else {
      mismatch(n, m);
    }
    cache_.exp_table_.emplace(key, value);
    return value;
  }

  // Joint orders 0..k of 1_m * g_m under p_n; order 0 collapses to prob().
  const MomentVector& moments(NodeId n, NodeId m, int k) {
    check_vtree_match(n, m);
    ++cache_.moment_stats_.lookups;
    auto key = PairCache::key(n, m);
    if (auto it = cache_.moment_table_.find(key); it != cache_.moment_table_.end()) {
      // entries are written once; a cache filled by a lower-order query
      // cannot serve a higher order
      if (it->second.order() < k)
        throw QueryError("pair cache reused at a higher moment order; use a fresh cache");
      return it->second;
    }
    ++cache_.moment_stats_.computed;

    const CircuitNode& pn = pc_.node(n);
    const CircuitNode& rm = rc_.node(m);
    MomentVector w;
    w.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
    w.values[0] = prob(n, m);

    if (rm.kind == NodeKind::Literal) {
      // higher orders stay 0
    } else if (pn.kind == NodeKind::Literal && rm.kind == NodeKind::Or) {
      for (std::size_t j = 0; j < rm.children.size(); ++j) {
        double hit = literal_prob(pn, rc_.node(rm.children[j]), n);
        if (hit == 0.0) continue;
        double power = 1.0;
        for (int t = 1; t <= k; ++t) {
          power *= rm.weights[j];
          w.values[t] += hit * power;
        }
      }
    } else if (pn.kind == NodeKind::Or && rm.kind == NodeKind::Or) {
      MomentVector tmp;
      for (std::size_t i = 0; i < pn.children.size(); ++i) {
        for (std::size_t j = 0; j < rm.children.size(); ++j) {
          const MomentVector& cv = *child_moments(pn.children[i], rm.children[j], k, tmp);
          double phi = rm.weights[j];
          for (int t = 1; t <= k; ++t) {
            double acc = cv.values[t];  // l = t term, phi^0
            double power = 1.0;
            for (int l = t - 1; l >= 0; --l) {
              power *= phi;
              acc += binomial(t, l) * power * cv.values[l];
            }
            w.values[t] += pn.weights[i] * acc;
          }
        }
      }
    } else if (pn.kind == NodeKind::And && rm.kind == NodeKind::And) {
      MomentVector ltmp, rtmp;
      const MomentVector& lv = *child_moments(pn.left, rm.left, k, ltmp);
      const MomentVector& rv = *child_moments(pn.right, rm.right, k, rtmp);
      for (int t = 1; t <= k; ++t) {
        double acc = 0.0;
        for (int l = 0; l <= t; ++l) acc += binomial(t, l) * lv.values[l] * rv.values[t - l];
        w.values[t] = acc;
      }
    } else {
      mismatch(n, m);
    }
    return cache_.moment_table_.emplace(key, std::move(w)).first->second;
  }

 private:
  // Literal-vs-literal pairs are O(1) and not worth a cache entry.
  double literal_prob(const CircuitNode& pn, const CircuitNode& rm, NodeId pc_node) {
    if (pn.kind != NodeKind::Literal || rm.kind != NodeKind::Literal)
      throw QueryError("pairwise traversal reached incompatible gate kinds");
    double mask = mask_ ? (*mask_)[pc_node] : 1.0;
    return pn.positive == rm.positive ? mask : 0.0;
  }

  // Moments of a child pair of any kind. Literal pairs are built into the
  // caller-provided buffer; gate pairs come from the (reference-stable)
  // memo table.
  const MomentVector* child_moments(NodeId n, NodeId m, int k, MomentVector& tmp) {
    const CircuitNode& pn = pc_.node(n);
    const CircuitNode& rm = rc_.node(m);
    if (pn.kind == NodeKind::Literal && rm.kind == NodeKind::Literal) {
      tmp.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
      tmp.values[0] = literal_prob(pn, rm, n);
      return &tmp;
    }
    return &moments(n, m, k);
  }

  void check_vtree_match(NodeId n, NodeId m) const {
    if (pc_.node(n).vtree_node != rc_.node(m).vtree_node)
      throw QueryError("vtree-node mismatch between paired circuit nodes");
  }

  void require(bool cond, NodeId n, NodeId m) const {
    if (!cond) mismatch(n, m);
  }

  [[noreturn]] void mismatch(NodeId n, NodeId m) const {
    throw QueryError("incompatible node kinds in pairwise traversal (pc node " +
                     std::to_string(n) + ", rc node " + std::to_string(m) + ")");
  }

  const Circuit& pc_;
  const Circuit& rc_;
  const std::vector<double>* mask_;
  PairCache& cache_;
};

namespace {

double pc_mass(const Circuit& pc, const std::vector<double>* mask) {
  if (!mask) return 1.0;  // normalized by the parameter validator
  ConfiguredPC view;
  view.base = &pc;
  view.leaf_mask = *mask;
  return marginal(view);
}

double ec2_impl(const Circuit& pc, const Circuit& rc, const std::vector<double>* mask,
                PairCache& cache) {
  PairTraversal walk(pc, rc, mask, cache);
  double e = walk.expectation(pc.root(), rc.root());
  if (rc.bias() != 0.0) e += rc.bias() * pc_mass(pc, mask);
  return e;
}

MomentVector mc2_impl(const Circuit& pc, const Circuit& rc, int k, const std::vector<double>* mask,
                      PairCache& cache) {
  if (k < 0) throw QueryError("moment order must be nonnegative");
  if (k > kMaxMomentOrder)
    throw QueryError("moment order exceeds the exact binomial table (order <= 60)");
  MomentVector out;
  out.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
  out.values[0] = pc_mass(pc, mask);
  if (k >= 1) {
    PairTraversal walk(pc, rc, mask, cache);
    const MomentVector& w = walk.moments(pc.root(), rc.root(), k);
    for (int t = 1; t <= k; ++t) out.values[t] = w.values[t];
  }
  if (rc.bias() != 0.0) out = shifted_moments(out, -rc.bias());
  return out;
}

}  // namespace

namespace {

void check_node_ids(const Circuit& pc, const Circuit& rc, NodeId n, NodeId m) {
  if (n >= pc.node_count() || m >= rc.node_count())
    throw QueryError("node id out of range in formula_prob");
}

}  // namespace

double formula_prob(const Circuit& pc, const Circuit& rc, NodeId pc_node, NodeId rc_node,
                    PairCache& cache) {
  check_node_ids(pc, rc, pc_node, rc_node);
  PairTraversal walk(pc, rc, nullptr, cache);
  return walk.prob(pc_node, rc_node);
}

double formula_prob(const ConfiguredPC& pc, const Circuit& rc, NodeId pc_node, NodeId rc_node,
                    PairCache& cache) {
  check_node_ids(*pc.base, rc, pc_node, rc_node);
  PairTraversal walk(*pc.base, rc, &pc.leaf_mask, cache);
  return walk.prob(pc_node, rc_node);
}

double ec2_expectation(const Circuit& pc, const Circuit& rc, PairCache& cache) {
  return ec2_impl(pc, rc, nullptr, cache);
}

double ec2_expectation(const ConfiguredPC& pc, const Circuit& rc, PairCache& cache) {
  return ec2_impl(*pc.base, rc, &pc.leaf_mask, cache);
}

MomentVector mc2_moments(const Circuit& pc, const Circuit& rc, int k, PairCache& cache) {
  return mc2_impl(pc, rc, k, nullptr, cache);
}

MomentVector mc2_moments(const ConfiguredPC& pc, const Circuit& rc, int k, PairCache& cache) {
  return mc2_impl(*pc.base, rc, k, &pc.leaf_mask, cache);
}

MomentVector shifted_moments(const MomentVector& moments, double alpha) {
  MomentVector out;
  out.values.assign(moments.values.size(), 0.0);
  int k = moments.order();
  for (int j = 0; j <= k; ++j) {
    double acc = 0.0;
    for (int l = 0; l <= j; ++l) {
      double coeff = binomial(j, l) * std::pow(-alpha, j - l);
      acc += coeff * moments.values[l];
    }
    out.values[j] = acc;
  }
  return out;
}

MomentVector conditional_moments(const Circuit& pc, const Circuit& rc, const Evidence& evidence,
                                 int k) {
  PairCache cache;
  if (evidence.empty()) return mc2_moments(pc, rc, k, cache);

  ConfiguredPC conf = configure(pc, evidence);
  double mass = marginal(conf);
  if (mass <= 1e-12) throw QueryError("evidence has (near-)zero probability");
  MomentVector raw = mc2_moments(conf, rc, k, cache);
  for (double& v : raw.values) v /= mass;
  return raw;
}

DistributionStats distribution_stats(const Circuit& pc, const Circuit& rc,
                                     const std::optional<Evidence>& evidence) {
  MomentVector m = conditional_moments(pc, rc, evidence ? *evidence : Evidence{}, 2);
  DistributionStats out;
  out.mean = m[1];
  out.variance = m[2] - m[1] * m[1];
  if (out.variance < 0.0) {
    if (out.variance < -1e-9) throw QueryError("negative variance beyond tolerance");
    out.variance = 0.0;
  }
  out.stddev = std::sqrt(out.variance);
  return out;
}

}  // namespace pcm
