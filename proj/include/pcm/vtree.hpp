#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pcm/varset.hpp"

namespace pcm {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Full binary tree over the variables. Leaves carry one variable each;
// internal nodes dictate how AND gates split their scope.
class Vtree {
 public:
  struct Node {
    bool leaf = false;
    VarId var = 0;           // leaf only
    NodeId left = kNoNode;   // internal only
    NodeId right = kNoNode;  // internal only
    NodeId parent = kNoNode;
  };

  // Nodes must list children before parents; the last node is the root.
  // Throws ParseError on structural violations (dup var, reused child, ...).
  static std::shared_ptr<const Vtree> build(std::vector<Node> nodes);

  // Right-linear vtree: var_order[0] at the top, leaves chained to the right.
  static std::shared_ptr<const Vtree> right_linear(const std::vector<VarId>& var_order);

  const Node& node(NodeId id) const { return nodes_[id]; }
  NodeId root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t var_count() const { return var_count_; }
  const VarSet& scope(NodeId id) const { return scopes_[id]; }
  bool has_var(VarId v) const { return v < leaf_of_var_.size() && leaf_of_var_[v] != kNoNode; }
  NodeId leaf_of(VarId v) const { return leaf_of_var_[v]; }

  // Variables in leaf order (left to right).
  std::vector<VarId> variables() const;

  static bool structurally_equal(const Vtree& a, const Vtree& b);

 private:
  Vtree() = default;

  std::vector<Node> nodes_;
  std::vector<VarSet> scopes_;
  std::vector<NodeId> leaf_of_var_;  // indexed by VarId
  NodeId root_ = kNoNode;
  std::size_t var_count_ = 0;
};

}  // namespace pcm
