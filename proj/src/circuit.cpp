#include "pcm/circuit.hpp"

#include <algorithm>

#include "pcm/errors.hpp"

namespace pcm {

Circuit::Circuit(std::shared_ptr<const Vtree> vtree, std::vector<CircuitNode> nodes,
                 NodeId root, CircuitRole role, double bias)
    : vtree_(std::move(vtree)), nodes_(std::move(nodes)), root_(root), role_(role), bias_(bias) {
  if (!vtree_) throw ParseError("circuit requires a vtree");
  if (nodes_.empty() || root_ >= nodes_.size()) throw ParseError("bad circuit root");
  if (role_ == CircuitRole::Generative && bias_ != 0.0)
    throw ParseError("generative circuits carry no bias");
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const CircuitNode& n = nodes_[id];
    switch (n.kind) {
      case NodeKind::Literal:
        if (n.vtree_node >= vtree_->node_count()) throw ParseError("literal maps to unknown vtree node");
        break;
      case NodeKind::And:
        if (n.left >= id || n.right >= id) throw ParseError("circuit children must precede parents");
        break;
      case NodeKind::Or:
        if (n.children.size() != n.weights.size()) throw ParseError("OR child/weight count mismatch");
        for (NodeId c : n.children)
          if (c >= id) throw ParseError("circuit children must precede parents");
        break;
    }
  }
}

std::size_t Circuit::edge_count() const {
  std::size_t edges = 0;
  for (const CircuitNode& n : nodes_) {
    if (n.kind == NodeKind::And) edges += 2;
    if (n.kind == NodeKind::Or) edges += n.children.size();
  }
  return edges;
}

Assignment Assignment::from_mask(std::uint64_t mask, std::size_t var_count) {
  Assignment a(var_count);
  for (std::size_t i = 0; i < var_count; ++i) a.set(static_cast<VarId>(i + 1), (mask >> i) & 1ULL);
  return a;
}

void Evidence::set(VarId v, bool value) {
  if (map_.count(v)) throw QueryError("variable " + std::to_string(v) + " assigned twice");
  map_[v] = value;
}

bool Evidence::consistent_with(const Assignment& x) const {
  for (auto [v, val] : map_)
    if (x.get(v) != val) return false;
  return true;
}

std::vector<VarSet> compute_scopes(const Circuit& circuit) {
  std::vector<VarSet> scopes(circuit.node_count());
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const CircuitNode& n = circuit.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        scopes[id].add(n.var);
        break;
      case NodeKind::And:
        scopes[id] = scopes[n.left];
        scopes[id] |= scopes[n.right];
        break;
      case NodeKind::Or:
        if (!n.children.empty()) scopes[id] = scopes[n.children.front()];
        break;
    }
  }
  return scopes;
}

bool is_alternating(const Circuit& circuit) {
  if (circuit.node(circuit.root()).kind != NodeKind::Or) return false;
  for (const CircuitNode& n : circuit.nodes()) {
    if (n.kind == NodeKind::Or) {
      for (NodeId c : n.children)
        if (circuit.node(c).kind == NodeKind::Or) return false;
    } else if (n.kind == NodeKind::And) {
      if (circuit.node(n.left).kind == NodeKind::And) return false;
      if (circuit.node(n.right).kind == NodeKind::And) return false;
    }
  }
  return true;
}

namespace {

struct Rebuilder {
  const Circuit& in;
  bool generative;
  std::vector<CircuitNode> out;
  std::vector<NodeId> remap;  // old id -> new id

  explicit Rebuilder(const Circuit& c)
      : in(c), generative(c.role() == CircuitRole::Generative), remap(c.node_count(), kNoNode) {}

  NodeId push(CircuitNode n) {
    out.push_back(std::move(n));
    return static_cast<NodeId>(out.size() - 1);
  }

  NodeId passthrough_or(NodeId child, NodeId vtree_node) {
    CircuitNode wrap;
    wrap.kind = NodeKind::Or;
    wrap.vtree_node = vtree_node;
    wrap.children = {child};
    wrap.weights = {generative ? 1.0 : 0.0};
    return push(std::move(wrap));
  }

  // Children of AND gates (and the root) must not themselves be AND gates.
  NodeId as_or_or_literal(NodeId new_id) {
    if (out[new_id].kind == NodeKind::And)
      return passthrough_or(new_id, out[new_id].vtree_node);
    return new_id;
  }

  void visit(NodeId id) {
    const CircuitNode& n = in.node(id);
    switch (n.kind) {
      case NodeKind::Literal:
        remap[id] = push(n);
        break;
      case NodeKind::And: {
        CircuitNode a = n;
        a.left = as_or_or_literal(remap[n.left]);
        a.right = as_or_or_literal(remap[n.right]);
        remap[id] = push(std::move(a));
        break;
      }
      case NodeKind::Or: {
        CircuitNode o;
        o.kind = NodeKind::Or;
        o.vtree_node = n.vtree_node;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          NodeId c = remap[n.children[i]];
          double w = n.weights[i];
          if (out[c].kind == NodeKind::Or) {
            // Splice the inner OR's edges into this gate. For a PC the mixture
            // weights multiply; for an RC the edge parameters add (the inner
            // gate fires on exactly the inputs its satisfied child fires on).
            const CircuitNode& inner = out[c];
            for (std::size_t j = 0; j < inner.children.size(); ++j) {
              o.children.push_back(inner.children[j]);
              o.weights.push_back(generative ? w * inner.weights[j] : w + inner.weights[j]);
            }
          } else {
            o.children.push_back(c);
            o.weights.push_back(w);
          }
        }
        remap[id] = push(std::move(o));
        break;
      }
    }
  }
};

}  // namespace

Circuit normalize_alternating(const Circuit& circuit) {
  // Rebuild only nodes reachable from the root, in the original topological
  // order, fixing shape violations as the parents are emitted.
  std::vector<bool> reachable(circuit.node_count(), false);
  reachable[circuit.root()] = true;
  for (NodeId id = circuit.node_count(); id-- > 0;) {
    if (!reachable[id]) continue;
    const CircuitNode& n = circuit.node(id);
    if (n.kind == NodeKind::And) {
      reachable[n.left] = reachable[n.right] = true;
    } else if (n.kind == NodeKind::Or) {
      for (NodeId c : n.children) reachable[c] = true;
    }
  }

  Rebuilder rb(circuit);
  for (NodeId id = 0; id < circuit.node_count(); ++id)
    if (reachable[id]) rb.visit(id);

  NodeId root = rb.remap[circuit.root()];
  if (rb.out[root].kind != NodeKind::Or)
    root = rb.passthrough_or(root, rb.out[root].vtree_node);

  // Drop nodes orphaned by OR splicing.
  std::vector<bool> keep(rb.out.size(), false);
  keep[root] = true;
  for (NodeId id = static_cast<NodeId>(rb.out.size()); id-- > 0;) {
    if (!keep[id]) continue;
    const CircuitNode& n = rb.out[id];
    if (n.kind == NodeKind::And) {
      keep[n.left] = keep[n.right] = true;
    } else if (n.kind == NodeKind::Or) {
      for (NodeId c : n.children) keep[c] = true;
    }
  }
  std::vector<NodeId> compact(rb.out.size(), kNoNode);
  std::vector<CircuitNode> nodes;
  nodes.reserve(rb.out.size());
  for (NodeId id = 0; id < rb.out.size(); ++id) {
    if (!keep[id]) continue;
    CircuitNode n = std::move(rb.out[id]);
    if (n.kind == NodeKind::And) {
      n.left = compact[n.left];
      n.right = compact[n.right];
    } else if (n.kind == NodeKind::Or) {
      for (NodeId& c : n.children) c = compact[c];
    }
    compact[id] = static_cast<NodeId>(nodes.size());
    nodes.push_back(std::move(n));
  }

  Circuit result(circuit.vtree_ptr(), std::move(nodes), compact[root], circuit.role(),
                 circuit.bias());
  result.set_vtree_hint(circuit.vtree_hint());
  return result;
}

}  // namespace pcm
