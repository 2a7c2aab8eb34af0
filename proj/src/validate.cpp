#include "pcm/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pcm {

std::string to_text(const ValidationReport& report) {
  std::ostringstream os;
  os << report.property << ": " << (report.ok ? "ok" : "violated");
  if (!report.note.empty()) os << " (" << report.note << ")";
  os << "\n";
  for (const auto& w : report.witnesses) {
    os << "  node";
    for (NodeId id : w.nodes) os << " " << id;
    os << ": " << w.explanation << "\n";
  }
  return os.str();
}

ValidationReport check_structured_decomposability(const Circuit& circuit, const Vtree& vtree) {
  ValidationReport report;
  report.property = "structured-decomposability";
  std::vector<VarSet> scopes = compute_scopes(circuit);
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const CircuitNode& n = circuit.node(id);
    if (n.vtree_node == kNoNode || n.vtree_node >= vtree.node_count()) {
      report.flag({id}, "node is not mapped to a vtree node");
      continue;
    }
    const Vtree::Node& v = vtree.node(n.vtree_node);
    if (n.kind == NodeKind::Literal) {
      if (!v.leaf || v.var != n.var)
        report.flag({id}, "literal of variable " + std::to_string(n.var) +
                              " is not mapped to that variable's vtree leaf");
      continue;
    }
    if (n.kind == NodeKind::And) {
      if (v.leaf) {
        report.flag({id}, "AND gate mapped to a vtree leaf");
        continue;
      }
      const VarSet& ls = scopes[n.left];
      const VarSet& rs = scopes[n.right];
      if (ls.intersects(rs)) report.flag({id}, "AND children scopes overlap");
      if (!ls.subset_of(vtree.scope(v.left)))
        report.flag({id}, "left child scope escapes the left vtree branch");
      if (!rs.subset_of(vtree.scope(v.right)))
        report.flag({id}, "right child scope escapes the right vtree branch");
    }
    // Gates must cover their vtree node exactly; a strictly smaller scope
    // means a vtree position was skipped, which the pairwise traversal
    // cannot line up.
    if (scopes[id] != vtree.scope(n.vtree_node))
      report.flag({id}, "gate scope differs from its vtree node's scope");
  }
  return report;
}

ValidationReport check_smoothness(const Circuit& circuit) {
  ValidationReport report;
  report.property = "smoothness";
  std::vector<VarSet> scopes = compute_scopes(circuit);
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const CircuitNode& n = circuit.node(id);
    if (n.kind != NodeKind::Or) continue;
    for (NodeId c : n.children) {
      if (scopes[c] != scopes[id]) {
        report.flag({id, c}, "OR children mention different variable sets");
        break;
      }
    }
  }
  return report;
}

namespace {

// Nodes of the sub-DAG under `top`, in evaluation (ascending id) order.
std::vector<NodeId> subcircuit_nodes(const Circuit& circuit, NodeId top) {
  std::vector<bool> in(circuit.node_count(), false);
  in[top] = true;
  for (NodeId id = top + 1; id-- > 0;) {
    if (!in[id]) continue;
    const CircuitNode& n = circuit.node(id);
    if (n.kind == NodeKind::And) {
      in[n.left] = in[n.right] = true;
    } else if (n.kind == NodeKind::Or) {
      for (NodeId c : n.children) in[c] = true;
    }
  }
  std::vector<NodeId> out;
  for (NodeId id = 0; id <= top; ++id)
    if (in[id]) out.push_back(id);
  return out;
}

}  // namespace

ValidationReport check_determinism(const Circuit& circuit) {
  ValidationReport report;
  report.property = "determinism";
  std::vector<VarSet> scopes = compute_scopes(circuit);
  std::vector<std::uint8_t> sat(circuit.node_count(), 0);
  std::mt19937_64 rng(0x5eedULL);

  for (NodeId gate = 0; gate < circuit.node_count(); ++gate) {
    const CircuitNode& g = circuit.node(gate);
    if (g.kind != NodeKind::Or || g.children.size() < 2) continue;

    VarSet scope = scopes[gate];
    for (NodeId c : g.children) scope |= scopes[c];
    std::vector<VarId> vars = scope.to_vector();
    std::vector<NodeId> order = subcircuit_nodes(circuit, gate);
    Assignment x(circuit.vtree().var_count());

    auto two_children_satisfied = [&]() -> bool {
      for (NodeId id : order) {
        const CircuitNode& n = circuit.node(id);
        switch (n.kind) {
          case NodeKind::Literal:
            sat[id] = x.get(n.var) == n.positive;
            break;
          case NodeKind::And:
            sat[id] = sat[n.left] && sat[n.right];
            break;
          case NodeKind::Or: {
            std::uint8_t any = 0;
            for (NodeId c : n.children) any |= sat[c];
            sat[id] = any;
            break;
          }
        }
      }
      int hot = 0;
      for (NodeId c : g.children) hot += sat[c];
      return hot > 1;
    };

    bool exhaustive = vars.size() <= 20;
    std::uint64_t trials = exhaustive ? (1ULL << vars.size()) : 10000;
    if (!exhaustive) report.note = "sampled";
    bool flagged = false;
    for (std::uint64_t t = 0; t < trials && !flagged; ++t) {
      for (std::size_t i = 0; i < vars.size(); ++i)
        x.set(vars[i], exhaustive ? ((t >> i) & 1ULL) : ((rng() >> 17) & 1ULL));
      if (two_children_satisfied()) {
        report.flag({gate}, "two children satisfied by one assignment");
        flagged = true;
      }
    }
  }
  return report;
}

ValidationReport check_pc_parameters(const Circuit& circuit) {
  ValidationReport report;
  report.property = "pc-parameters";
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const CircuitNode& n = circuit.node(id);
    if (n.kind != NodeKind::Or) continue;
    double sum = 0.0;
    for (double w : n.weights) {
      if (w < 0.0) report.flag({id}, "negative mixture weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      report.flag({id}, "mixture weights sum to " + std::to_string(sum));
  }
  return report;
}

ValidationReport check_vtree_compatibility(const Circuit& pc, const Circuit& rc) {
  ValidationReport report;
  report.property = "vtree-compatibility";
  if (!Vtree::structurally_equal(pc.vtree(), rc.vtree()))
    report.flag({pc.root(), rc.root()}, "circuits reference structurally different vtrees");
  return report;
}

std::vector<ValidationReport> validate_circuit(const Circuit& circuit) {
  std::vector<ValidationReport> reports;
  reports.push_back(check_structured_decomposability(circuit, circuit.vtree()));
  reports.push_back(check_smoothness(circuit));
  if (circuit.role() == CircuitRole::Generative) {
    reports.push_back(check_pc_parameters(circuit));
  } else {
    reports.push_back(check_determinism(circuit));
  }
  return reports;
}

}  // namespace pcm
