#include "webqa/webtree.hpp"

#include <algorithm>

#include "webqa/errors.hpp"

namespace webqa {

std::string_view to_string(NodeType type) {
  switch (type) {
    case NodeType::List:
      return "list";
    case NodeType::Table:
      return "table";
    case NodeType::None:
      break;
  }
  return "none";
}

NodeType node_type_from_string(std::string_view name) {
  if (name == "list") return NodeType::List;
  if (name == "table") return NodeType::Table;
  if (name == "none") return NodeType::None;
  throw ContractViolation("unknown node type '" + std::string(name) + "'");
}

Webpage::Webpage(std::vector<TreeNode> nodes, const std::vector<Edge>& edges, NodeId root,
                 std::string source_uri)
    : nodes_(std::move(nodes)), root_(root), source_uri_(std::move(source_uri)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw ContractViolation("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }
  if (!contains(root_)) throw ContractViolation("root id " + std::to_string(root_) + " is not a node");
  children_.resize(nodes_.size());
  parent_.resize(nodes_.size());
  for (const auto& [p, c] : edges) {
    if (!contains(p) || !contains(c)) {
      throw ContractViolation("edge references unknown node (" + std::to_string(p) + ", " +
                              std::to_string(c) + ")");
    }
    if (c == root_) throw ContractViolation("root cannot have a parent");
    auto& slot_parent = parent_[slot(c)];
    if (slot_parent) throw ContractViolation("node " + std::to_string(c) + " has two parents");
    slot_parent = p;
    children_[slot(p)].push_back(c);
  }
  // Pre-order walk; also detects cycles and unreachable nodes.
  order_.assign(nodes_.size(), nodes_.size());
  depth_.assign(nodes_.size(), 0);
  std::vector<NodeId> stack{root_};
  std::size_t next = 0;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const std::size_t s = slot(id);
    if (order_[s] != nodes_.size()) throw ContractViolation("edges contain a cycle");
    order_[s] = next++;
    const auto& kids = children_[s];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      depth_[slot(*it)] = depth_[s] + 1;
      stack.push_back(*it);
    }
  }
  if (next != nodes_.size()) throw ContractViolation("edges do not connect every node to the root");
}

std::size_t Webpage::slot(NodeId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("unknown node id " + std::to_string(id));
  return it->second;
}

const TreeNode& Webpage::node(NodeId id) const { return nodes_[slot(id)]; }

std::optional<NodeId> Webpage::parent(NodeId id) const { return parent_[slot(id)]; }

std::span<const NodeId> Webpage::children(NodeId id) const { return children_[slot(id)]; }

NodeSet Webpage::descendants(NodeId id) const {
  NodeSet out;
  std::vector<NodeId> stack;
  const auto& kids = children_[slot(id)];
  stack.assign(kids.rbegin(), kids.rend());
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    out.push_back(n);
    const auto& sub = children_[slot(n)];
    stack.insert(stack.end(), sub.rbegin(), sub.rend());
  }
  return out;
}

bool Webpage::is_leaf(NodeId id) const { return children_[slot(id)].empty(); }

bool Webpage::is_elem(NodeId id) const {
  const auto p = parent_[slot(id)];
  if (!p) return false;
  const NodeType t = node(*p).type;
  return t == NodeType::List || t == NodeType::Table;
}

std::string Webpage::node_text(NodeId id, bool whole_subtree) const {
  const std::string& own = node(id).text;
  if (!whole_subtree) return own;
  std::vector<std::string> parts;
  if (!own.empty()) parts.push_back(own);
  for (NodeId d : descendants(id)) {
    const std::string& t = node(d).text;
    if (!t.empty()) parts.push_back(t);
  }
  return join(parts, "\n");
}

std::size_t Webpage::depth_of(NodeId id) const { return depth_[slot(id)]; }

std::size_t Webpage::order_of(NodeId id) const { return order_[slot(id)]; }

void Webpage::sort_document_order(NodeSet& nodes) const {
  std::sort(nodes.begin(), nodes.end(),
            [this](NodeId a, NodeId b) { return order_of(a) < order_of(b); });
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
}

std::vector<TreeNode> Webpage::nodes_in_order() const {
  std::vector<TreeNode> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[order_[i]] = nodes_[i];
  return out;
}

std::vector<Edge> Webpage::edges() const {
  std::vector<Edge> out;
  for (const auto& n : nodes_in_order()) {
    for (NodeId c : children(n.id)) out.emplace_back(n.id, c);
  }
  return out;
}

bool operator==(const Webpage& a, const Webpage& b) {
  return a.root_ == b.root_ && a.source_uri_ == b.source_uri_ &&
         a.nodes_in_order() == b.nodes_in_order() && a.edges() == b.edges();
}

void Corpus::add(std::string id, PagePtr page) {
  if (find(id)) throw ContractViolation("duplicate page id '" + id + "'");
  if (!page) throw ContractViolation("null page for id '" + id + "'");
  ids_.push_back(std::move(id));
  pages_.push_back(std::move(page));
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

const PagePtr& Corpus::at(std::string_view id) const {
  const auto i = find(id);
  if (!i) throw LookupError("unknown page id '" + std::string(id) + "'");
  return pages_[*i];
}

}  // namespace webqa
