#include "pcm/evaluate.hpp"

#include <cmath>
#include <random>

#include "pcm/errors.hpp"

namespace pcm {

namespace {

void require_complete(const Circuit& c, const Assignment& x) {
  if (x.var_count() < c.vtree().var_count())
    throw QueryError("assignment does not cover all circuit variables");
  for (VarId v : c.vtree().variables())
    if (v > x.var_count()) throw QueryError("assignment does not cover variable " + std::to_string(v));
}

void require_known_vars(const Circuit& c, const Evidence& evidence) {
  for (auto [v, value] : evidence.assignments()) {
    (void)value;
    if (!c.vtree().has_var(v))
      throw QueryError("evidence variable " + std::to_string(v) + " is not in the circuit");
  }
}

double bottom_up_mass(const Circuit& pc, const std::vector<double>* mask,
                      const Evidence* evidence) {
  std::vector<double> val(pc.node_count(), 0.0);
  for (NodeId id = 0; id < pc.node_count(); ++id) {
    const CircuitNode& n = pc.node(id);
    switch (n.kind) {
      case NodeKind::Literal: {
        double m = 1.0;
        if (mask) {
          m = (*mask)[id];
        } else if (evidence && evidence->assigned(n.var)) {
          m = evidence->value(n.var) == n.positive ? 1.0 : 0.0;
        }
        val[id] = m;
        break;
      }
      case NodeKind::And:
        val[id] = val[n.left] * val[n.right];
        break;
      case NodeKind::Or: {
        double s = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i) s += n.weights[i] * val[n.children[i]];
        val[id] = s;
        break;
      }
    }
  }
  return val[pc.root()];
}

}  // namespace

double evaluate_pc(const Circuit& pc, const Assignment& x) {
  require_complete(pc, x);
  std::vector<double> val(pc.node_count(), 0.0);
  for (NodeId id = 0; id < pc.node_count(); ++id) {
    const CircuitNode& n = pc.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        val[id] = x.get(n.var) == n.positive ? 1.0 : 0.0;
        break;
      case NodeKind::And:
        val[id] = val[n.left] * val[n.right];
        break;
      case NodeKind::Or: {
        double s = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i) s += n.weights[i] * val[n.children[i]];
        val[id] = s;
        break;
      }
    }
  }
  return val[pc.root()];
}

double marginal(const Circuit& pc, const Evidence& evidence) {
  require_known_vars(pc, evidence);
  return bottom_up_mass(pc, nullptr, &evidence);
}

double marginal(const ConfiguredPC& pc) { return bottom_up_mass(*pc.base, &pc.leaf_mask, nullptr); }

ConfiguredPC configure(const Circuit& pc, const Evidence& evidence) {
  require_known_vars(pc, evidence);
  ConfiguredPC out;
  out.base = &pc;
  out.evidence = evidence;
  out.leaf_mask.assign(pc.node_count(), 1.0);
  for (NodeId id = 0; id < pc.node_count(); ++id) {
    const CircuitNode& n = pc.node(id);
    if (n.kind != NodeKind::Literal) continue;
    if (evidence.assigned(n.var) && evidence.value(n.var) != n.positive) out.leaf_mask[id] = 0.0;
  }
  return out;
}

double evaluate_configured(const ConfiguredPC& pc, const Assignment& x) {
  if (!pc.evidence.consistent_with(x)) return 0.0;
  return evaluate_pc(*pc.base, x);
}

bool is_output_deterministic(const Circuit& pc) {
  const std::size_t n_vars = pc.vtree().var_count();
  std::vector<double> val(pc.node_count(), 0.0);

  auto violates = [&](const Assignment& x) {
    for (NodeId id = 0; id < pc.node_count(); ++id) {
      const CircuitNode& n = pc.node(id);
      switch (n.kind) {
        case NodeKind::Literal:
          val[id] = x.get(n.var) == n.positive ? 1.0 : 0.0;
          break;
        case NodeKind::And:
          val[id] = val[n.left] * val[n.right];
          break;
        case NodeKind::Or: {
          double s = 0.0;
          int hot = 0;
          for (std::size_t i = 0; i < n.children.size(); ++i) {
            double term = n.weights[i] * val[n.children[i]];
            if (term != 0.0) ++hot;
            s += term;
          }
          if (hot > 1) return true;
          val[id] = s;
          break;
        }
      }
    }
    return false;
  };

  if (n_vars <= 20) {
    const std::uint64_t total = 1ULL << n_vars;
    for (std::uint64_t m = 0; m < total; ++m)
      if (violates(Assignment::from_mask(m, n_vars))) return false;
    return true;
  }
  std::mt19937_64 rng(0x5eedULL);
  Assignment x(n_vars);
  for (int s = 0; s < 10000; ++s) {
    for (std::size_t v = 1; v <= n_vars; ++v) x.set(static_cast<VarId>(v), (rng() >> 13) & 1ULL);
    if (violates(x)) return false;
  }
  return true;
}

MpeResult mpe(const Circuit& pc, const Evidence& evidence, std::optional<bool> deterministic_hint) {
  ConfiguredPC conf = configure(pc, evidence);

  // Upward max-product pass over masked leaves, remembering the first child
  // attaining each OR maximum.
  std::vector<double> val(pc.node_count(), 0.0);
  std::vector<std::size_t> pick(pc.node_count(), 0);
  for (NodeId id = 0; id < pc.node_count(); ++id) {
    const CircuitNode& n = pc.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        val[id] = conf.leaf_mask[id];
        break;
      case NodeKind::And:
        val[id] = val[n.left] * val[n.right];
        break;
      case NodeKind::Or: {
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          double term = n.weights[i] * val[n.children[i]];
          if (term > best) {
            best = term;
            best_i = i;
          }
        }
        val[id] = best;
        pick[id] = best_i;
        break;
      }
    }
  }
  if (val[pc.root()] <= 0.0) throw QueryError("inconsistent evidence");

  // Top-down decode along the chosen edges.
  Assignment completion(pc.vtree().var_count());
  std::vector<NodeId> stack{pc.root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const CircuitNode& n = pc.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        completion.set(n.var, n.positive);
        break;
      case NodeKind::And:
        stack.push_back(n.left);
        stack.push_back(n.right);
        break;
      case NodeKind::Or:
        stack.push_back(n.children[pick[id]]);
        break;
    }
  }

  MpeResult out;
  out.completion = completion;
  out.probability = evaluate_pc(pc, completion);
  bool deterministic = deterministic_hint ? *deterministic_hint : is_output_deterministic(pc);
  out.approximate = !deterministic;
  return out;
}

double evaluate_rc(const Circuit& rc, const Assignment& x) {
  require_complete(rc, x);
  std::vector<double> g(rc.node_count(), 0.0);
  std::vector<std::uint8_t> sat(rc.node_count(), 0);
  for (NodeId id = 0; id < rc.node_count(); ++id) {
    const CircuitNode& n = rc.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        sat[id] = x.get(n.var) == n.positive;
        g[id] = 0.0;
        break;
      case NodeKind::And:
        sat[id] = sat[n.left] && sat[n.right];
        g[id] = g[n.left] + g[n.right];
        break;
      case NodeKind::Or: {
        int hot = 0;
        double s = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          NodeId c = n.children[i];
          if (sat[c]) {
            ++hot;
            s += n.weights[i] + g[c];
          }
        }
        if (hot > 1)
          throw QueryError("determinism violation at OR gate " + std::to_string(id));
        sat[id] = hot == 1;
        g[id] = s;
        break;
      }
    }
  }
  return rc.bias() + g[rc.root()];
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double predict_lc(const Circuit& rc, const Assignment& x) { return sigmoid(evaluate_rc(rc, x)); }

}  // namespace pcm
