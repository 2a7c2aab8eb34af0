#include "pcm/vtree.hpp"

#include <algorithm>

#include "pcm/errors.hpp"

namespace pcm {

std::shared_ptr<const Vtree> Vtree::build(std::vector<Node> nodes) {
  if (nodes.empty()) throw ParseError("vtree has no nodes");
  auto vt = std::shared_ptr<Vtree>(new Vtree());
  vt->nodes_ = std::move(nodes);
  vt->root_ = static_cast<NodeId>(vt->nodes_.size() - 1);
  vt->scopes_.resize(vt->nodes_.size());

  std::vector<bool> used_as_child(vt->nodes_.size(), false);
  for (NodeId id = 0; id < vt->nodes_.size(); ++id) {
    Node& n = vt->nodes_[id];
    if (n.leaf) {
      if (n.var == 0) throw ParseError("variable ids are 1-based");
      if (vt->has_var(n.var))
        throw ParseError("variable " + std::to_string(n.var) + " appears in two leaves");
      if (n.var >= vt->leaf_of_var_.size()) vt->leaf_of_var_.resize(n.var + 1, kNoNode);
      vt->leaf_of_var_[n.var] = id;
      vt->scopes_[id].add(n.var);
      ++vt->var_count_;
    } else {
      if (n.left >= id || n.right >= id)
        throw ParseError("vtree children must precede parents");
      if (n.left == n.right) throw ParseError("child reused");
      if (used_as_child[n.left] || used_as_child[n.right]) throw ParseError("child reused");
      used_as_child[n.left] = used_as_child[n.right] = true;
      vt->nodes_[n.left].parent = id;
      vt->nodes_[n.right].parent = id;
      vt->scopes_[id] = vt->scopes_[n.left];
      vt->scopes_[id] |= vt->scopes_[n.right];
    }
  }
  for (NodeId id = 0; id + 1 < vt->nodes_.size(); ++id)
    if (!used_as_child[id])
      throw ParseError("node " + std::to_string(id) + " is unreachable from the root");
  // assignments, datasets and the enumeration oracle all index variables
  // 1..n, so the numbering must be dense
  for (VarId v = 1; v <= vt->var_count_; ++v)
    if (!vt->has_var(v))
      throw ParseError("variables must be numbered 1..n densely; missing " + std::to_string(v));
  return vt;
}

std::shared_ptr<const Vtree> Vtree::right_linear(const std::vector<VarId>& var_order) {
  if (var_order.empty()) throw ParseError("empty variable order");
  std::vector<Node> nodes;
  // Leaves bottom-up from the last variable so that children precede parents.
  NodeId chain = kNoNode;
  for (std::size_t i = var_order.size(); i-- > 0;) {
    Node leaf;
    leaf.leaf = true;
    leaf.var = var_order[i];
    nodes.push_back(leaf);
    NodeId leaf_id = static_cast<NodeId>(nodes.size() - 1);
    if (chain == kNoNode) {
      chain = leaf_id;
    } else {
      Node internal;
      internal.leaf = false;
      internal.left = leaf_id;
      internal.right = chain;
      nodes.push_back(internal);
      chain = static_cast<NodeId>(nodes.size() - 1);
    }
  }
  return build(std::move(nodes));
}

std::vector<VarId> Vtree::variables() const {
  std::vector<VarId> out;
  out.reserve(var_count_);
  // Depth-first, left child first: leaf variables come out left to right.
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (n.leaf) {
      out.push_back(n.var);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

bool Vtree::structurally_equal(const Vtree& a, const Vtree& b) {
  if (&a == &b) return true;
  if (a.node_count() != b.node_count() || a.var_count() != b.var_count()) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const Node& nx = a.node(x);
    const Node& ny = b.node(y);
    if (nx.leaf != ny.leaf) return false;
    if (nx.leaf) {
      if (nx.var != ny.var) return false;
    } else {
      stack.emplace_back(nx.left, ny.left);
      stack.emplace_back(nx.right, ny.right);
    }
  }
  return true;
}

}  // namespace pcm
