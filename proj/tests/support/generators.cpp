#include "generators.hpp"

#include <algorithm>
#include <numeric>

namespace pcm::testgen {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

NodeId build_vtree_rec(std::vector<Vtree::Node>& nodes, std::mt19937_64& rng,
                       const std::vector<VarId>& vars, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) {
    Vtree::Node leaf;
    leaf.leaf = true;
    leaf.var = vars[lo];
    nodes.push_back(leaf);
    return static_cast<NodeId>(nodes.size() - 1);
  }
  std::size_t split = lo + 1 + pick(rng, hi - lo - 1);
  NodeId left = build_vtree_rec(nodes, rng, vars, lo, split);
  NodeId right = build_vtree_rec(nodes, rng, vars, split, hi);
  Vtree::Node internal;
  internal.leaf = false;
  internal.left = left;
  internal.right = right;
  nodes.push_back(internal);
  return static_cast<NodeId>(nodes.size() - 1);
}

struct Builder {
  std::vector<CircuitNode> nodes;

  NodeId literal(VarId var, bool positive, NodeId v) {
    CircuitNode n;
    n.kind = NodeKind::Literal;
    n.var = var;
    n.positive = positive;
    n.vtree_node = v;
    nodes.push_back(n);
    return static_cast<NodeId>(nodes.size() - 1);
  }
  NodeId and_gate(NodeId l, NodeId r, NodeId v) {
    CircuitNode n;
    n.kind = NodeKind::And;
    n.left = l;
    n.right = r;
    n.vtree_node = v;
    nodes.push_back(n);
    return static_cast<NodeId>(nodes.size() - 1);
  }
  NodeId or_gate(std::vector<NodeId> ch, std::vector<double> w, NodeId v) {
    CircuitNode n;
    n.kind = NodeKind::Or;
    n.children = std::move(ch);
    n.weights = std::move(w);
    n.vtree_node = v;
    nodes.push_back(n);
    return static_cast<NodeId>(nodes.size() - 1);
  }
};

std::vector<double> normalized_weights(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) {
    x = uniform(rng, 0.05, 1.0);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

// Shared machinery for deterministic circuits: sets of pairwise-exclusive,
// jointly exhaustive nodes per vtree node, grouped into OR gates.
struct DetGen {
  Builder& b;
  const Vtree& vt;
  std::mt19937_64& rng;
  bool generative;
  double weight_range;
  int pool_size;
  std::vector<std::vector<NodeId>> pools;  // exhaustive nodes per vtree node

  DetGen(Builder& builder, const Vtree& vtree, std::mt19937_64& r, bool gen, double range,
         int pool)
      : b(builder), vt(vtree), rng(r), generative(gen), weight_range(range), pool_size(pool) {
    pools.resize(vt.node_count());
  }

  double edge_weight() { return generative ? 0.0 : uniform(rng, -weight_range, weight_range); }

  std::vector<NodeId> exclusive_set(NodeId v) {
    const Vtree::Node& node = vt.node(v);
    if (node.leaf) {
      if (rng() & 1) {
        double w1 = edge_weight(), w2 = edge_weight();
        if (generative) {
          w1 = uniform(rng, 0.05, 0.95);
          w2 = 1.0 - w1;
        }
        NodeId pos = b.literal(node.var, true, v);
        NodeId neg = b.literal(node.var, false, v);
        return {b.or_gate({pos, neg}, {w1, w2}, v)};
      }
      return {b.literal(node.var, true, v), b.literal(node.var, false, v)};
    }

    std::vector<NodeId> primes = exclusive_set(node.left);
    std::vector<NodeId> ands;
    ands.reserve(primes.size());
    for (NodeId p : primes) ands.push_back(b.and_gate(p, exhaustive(node.right), v));

    // Partition the exclusive ANDs into 1..n OR gates.
    std::shuffle(ands.begin(), ands.end(), rng);
    std::size_t groups = 1 + pick(rng, ands.size());
    std::vector<std::vector<NodeId>> buckets(groups);
    for (std::size_t i = 0; i < ands.size(); ++i) buckets[i % groups].push_back(ands[i]);

    std::vector<NodeId> out;
    for (auto& bucket : buckets) {
      std::vector<double> w;
      if (generative) {
        w = normalized_weights(rng, bucket.size());
      } else {
        for (std::size_t i = 0; i < bucket.size(); ++i) w.push_back(edge_weight());
      }
      out.push_back(b.or_gate(std::move(bucket), std::move(w), v));
    }
    return out;
  }

  NodeId exhaustive(NodeId v) {
    auto& pool = pools[v];
    if (!pool.empty() && (pool.size() >= static_cast<std::size_t>(pool_size) || (rng() & 1)))
      return pool[pick(rng, pool.size())];

    const Vtree::Node& node = vt.node(v);
    NodeId made;
    if (node.leaf) {
      double w1 = edge_weight(), w2 = edge_weight();
      if (generative) {
        w1 = uniform(rng, 0.05, 0.95);
        w2 = 1.0 - w1;
      }
      NodeId pos = b.literal(node.var, true, v);
      NodeId neg = b.literal(node.var, false, v);
      made = b.or_gate({pos, neg}, {w1, w2}, v);
    } else {
      std::vector<NodeId> primes = exclusive_set(node.left);
      std::vector<NodeId> ands;
      for (NodeId p : primes) ands.push_back(b.and_gate(p, exhaustive(node.right), v));
      std::vector<double> w;
      if (generative) {
        w = normalized_weights(rng, ands.size());
      } else {
        for (std::size_t i = 0; i < ands.size(); ++i) w.push_back(edge_weight());
      }
      made = b.or_gate(std::move(ands), std::move(w), v);
    }
    pool.push_back(made);
    return made;
  }
};

}  // namespace

std::shared_ptr<const Vtree> random_vtree(std::mt19937_64& rng, int n_vars) {
  std::vector<VarId> vars(n_vars);
  std::iota(vars.begin(), vars.end(), 1);
  std::shuffle(vars.begin(), vars.end(), rng);
  std::vector<Vtree::Node> nodes;
  build_vtree_rec(nodes, rng, vars, 0, vars.size());
  return Vtree::build(std::move(nodes));
}

Circuit random_pc(std::shared_ptr<const Vtree> vtree, std::mt19937_64& rng,
                  const PcOptions& options) {
  Builder b;
  if (options.deterministic) {
    DetGen gen(b, *vtree, rng, /*generative=*/true, 0.0, options.pool);
    NodeId root = gen.exhaustive(vtree->root());
    return Circuit(std::move(vtree), std::move(b.nodes), root, CircuitRole::Generative);
  }

  // Free-form smooth mixtures: a small pool of nodes per vtree node, ANDs
  // drawing children from the child pools.
  std::vector<std::vector<NodeId>> pools(vtree->node_count());
  for (NodeId v = 0; v < vtree->node_count(); ++v) {
    const Vtree::Node& node = vtree->node(v);
    int entries = 1 + static_cast<int>(pick(rng, options.pool));
    for (int e = 0; e < entries; ++e) {
      if (node.leaf) {
        if (uniform(rng, 0.0, 1.0) < options.literal_leaf_prob) {
          pools[v].push_back(b.literal(node.var, (rng() & 1) != 0, v));
        } else {
          double t = uniform(rng, 0.05, 0.95);
          NodeId pos = b.literal(node.var, true, v);
          NodeId neg = b.literal(node.var, false, v);
          pools[v].push_back(b.or_gate({pos, neg}, {t, 1.0 - t}, v));
        }
      } else {
        std::size_t parts = 1 + pick(rng, options.max_parts);
        std::vector<NodeId> ands;
        for (std::size_t i = 0; i < parts; ++i) {
          NodeId l = pools[node.left][pick(rng, pools[node.left].size())];
          NodeId r = pools[node.right][pick(rng, pools[node.right].size())];
          ands.push_back(b.and_gate(l, r, v));
        }
        pools[v].push_back(b.or_gate(std::move(ands), normalized_weights(rng, parts), v));
      }
    }
  }
  NodeId root = pools[vtree->root()].back();
  // root must be an OR gate
  if (b.nodes[root].kind != NodeKind::Or) {
    for (NodeId cand : pools[vtree->root()])
      if (b.nodes[cand].kind == NodeKind::Or) root = cand;
  }
  return Circuit(std::move(vtree), std::move(b.nodes), root, CircuitRole::Generative);
}

Circuit random_rc(std::shared_ptr<const Vtree> vtree, std::mt19937_64& rng,
                  const RcOptions& options) {
  Builder b;
  DetGen gen(b, *vtree, rng, /*generative=*/false, options.weight_range, options.pool);

  if (options.literal_leaf_prob > 0.0) {
    // Occasionally replace a leaf OR's use with a bare literal by generating
    // fresh literal pool entries; keeps determinism, drops root validity.
    for (NodeId v = 0; v < vtree->node_count(); ++v) {
      const Vtree::Node& node = vtree->node(v);
      if (node.leaf && uniform(rng, 0.0, 1.0) < options.literal_leaf_prob)
        gen.pools[v].push_back(b.literal(node.var, (rng() & 1) != 0, v));
    }
  }

  NodeId root = gen.exhaustive(vtree->root());
  double bias = uniform(rng, 0.0, 1.0) < options.bias_prob ? uniform(rng, -2.0, 2.0) : 0.0;
  return Circuit(std::move(vtree), std::move(b.nodes), root, CircuitRole::Discriminative, bias);
}

Evidence random_evidence(const Vtree& vtree, std::mt19937_64& rng, double observe_prob) {
  Evidence ev;
  for (VarId v : vtree.variables())
    if (uniform(rng, 0.0, 1.0) < observe_prob) ev.set(v, (rng() & 1) != 0);
  return ev;
}

namespace {

NodeId point_mass_rec(Builder& b, const Vtree& vt, NodeId v, const Assignment& x) {
  const Vtree::Node& node = vt.node(v);
  if (node.leaf) {
    NodeId pos = b.literal(node.var, true, v);
    NodeId neg = b.literal(node.var, false, v);
    double on = x.get(node.var) ? 1.0 : 0.0;
    return b.or_gate({pos, neg}, {on, 1.0 - on}, v);
  }
  NodeId l = point_mass_rec(b, vt, node.left, x);
  NodeId r = point_mass_rec(b, vt, node.right, x);
  NodeId a = b.and_gate(l, r, v);
  return b.or_gate({a}, {1.0}, v);
}

}  // namespace

Circuit point_mass_pc(std::shared_ptr<const Vtree> vtree, const Assignment& x) {
  Builder b;
  NodeId root = point_mass_rec(b, *vtree, vtree->root(), x);
  return Circuit(std::move(vtree), std::move(b.nodes), root, CircuitRole::Generative);
}

Circuit scale_weights(const Circuit& rc, double c) {
  std::vector<CircuitNode> nodes(rc.nodes());
  for (CircuitNode& n : nodes)
    if (n.kind == NodeKind::Or)
      for (double& w : n.weights) w *= c;
  return Circuit(rc.vtree_ptr(), std::move(nodes), rc.root(), rc.role(), rc.bias());
}

}  // namespace pcm::testgen
