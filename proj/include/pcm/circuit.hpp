#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pcm/vtree.hpp"

namespace pcm {

enum class NodeKind : std::uint8_t { Literal, And, Or };
enum class CircuitRole : std::uint8_t { Generative, Discriminative };

// One gate or literal leaf. OR children are ordered; their order matters for
// MPE tie-breaking and for serialization stability.
struct CircuitNode {
  NodeKind kind = NodeKind::Literal;
  NodeId vtree_node = kNoNode;

  // Literal
  VarId var = 0;
  bool positive = true;

  // And
  NodeId left = kNoNode;
  NodeId right = kNoNode;

  // Or
  std::vector<NodeId> children;
  std::vector<double> weights;  // theta (generative) or phi (discriminative)
};

// Shared DAG representation for PCs (role Generative, weights theta) and
// RCs/LCs (role Discriminative, weights phi plus one global root bias).
// Immutable after construction; nodes are topologically ordered with children
// preceding parents.
class Circuit {
 public:
  Circuit(std::shared_ptr<const Vtree> vtree, std::vector<CircuitNode> nodes,
          NodeId root, CircuitRole role, double bias = 0.0);

  const CircuitNode& node(NodeId id) const { return nodes_[id]; }
  const std::vector<CircuitNode>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  CircuitRole role() const { return role_; }
  double bias() const { return bias_; }
  const Vtree& vtree() const { return *vtree_; }
  const std::shared_ptr<const Vtree>& vtree_ptr() const { return vtree_; }

  // Total edge count (OR fan-in plus two per AND gate).
  std::size_t edge_count() const;

  // Name of the vtree file this circuit was parsed against, if any; kept so
  // serialization can reproduce the header byte for byte.
  const std::string& vtree_hint() const { return vtree_hint_; }
  void set_vtree_hint(std::string hint) { vtree_hint_ = std::move(hint); }

 private:
  std::shared_ptr<const Vtree> vtree_;
  std::vector<CircuitNode> nodes_;
  NodeId root_;
  CircuitRole role_;
  double bias_;
  std::string vtree_hint_;
};

// Complete assignment of all circuit variables, 1-based.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t var_count) : bits_(var_count + 1, 0) {}

  // Bits of `mask` taken as values of variables 1..var_count (var i = bit i-1).
  static Assignment from_mask(std::uint64_t mask, std::size_t var_count);

  bool get(VarId v) const { return bits_[v] != 0; }
  void set(VarId v, bool value) { bits_[v] = value ? 1 : 0; }
  std::size_t var_count() const { return bits_.empty() ? 0 : bits_.size() - 1; }

  bool operator==(const Assignment& o) const { return bits_ == o.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Partial assignment of variables; construction rejects double assignment.
class Evidence {
 public:
  Evidence() = default;

  // Throws QueryError if v was already assigned (any value).
  void set(VarId v, bool value);

  bool assigned(VarId v) const { return map_.count(v) != 0; }
  bool value(VarId v) const { return map_.at(v); }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<VarId, bool>& assignments() const { return map_; }

  bool consistent_with(const Assignment& x) const;

 private:
  std::map<VarId, bool> map_;
};

// Per-node scope table (indexed by node id). Scope of an OR gate is the scope
// of its first child; validators diagnose smoothness violations separately.
std::vector<VarSet> compute_scopes(const Circuit& circuit);

// True if the root is an OR gate, no OR gate feeds an OR gate, and no AND
// gate feeds an AND gate. The pairwise traversal requires this shape.
bool is_alternating(const Circuit& circuit);

// Rewrites the circuit into the alternating shape, preserving evaluations on
// every complete input: AND-root and literal-root get a pass-through OR
// (theta=1 / phi=0), an AND gate feeding an AND gate gets a pass-through OR
// between them, and an OR gate feeding an OR gate is spliced into its parent
// (weights multiplied for PCs, added for RCs). Idempotent.
Circuit normalize_alternating(const Circuit& circuit);

}  // namespace pcm
