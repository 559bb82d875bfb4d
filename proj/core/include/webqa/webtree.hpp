#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "webqa/text.hpp"

namespace webqa {

enum class NodeType { None, List, Table };

std::string_view to_string(NodeType type);
NodeType node_type_from_string(std::string_view name);

using NodeId = int;

struct TreeNode {
  NodeId id = 0;
  std::string text;  // the node's own content, never the subtree concatenation
  NodeType type = NodeType::None;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

using Edge = std::pair<NodeId, NodeId>;

// Node ids sorted by document order, no duplicates.
using NodeSet = std::vector<NodeId>;

// A rooted, ordered tree of text nodes. Immutable once built.
class Webpage {
 public:
  // Throws ContractViolation unless the edges form a single tree rooted at `root`
  // that spans every node. Child order follows the order of `edges`.
  Webpage(std::vector<TreeNode> nodes, const std::vector<Edge>& edges, NodeId root,
          std::string source_uri = {});

  [[nodiscard]] NodeId root() const noexcept { return root_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] bool contains(NodeId id) const noexcept { return index_.count(id) != 0; }
  [[nodiscard]] const TreeNode& node(NodeId id) const;
  [[nodiscard]] std::optional<NodeId> parent(NodeId id) const;
  [[nodiscard]] std::span<const NodeId> children(NodeId id) const;
  // Strict descendants in pre-order.
  [[nodiscard]] NodeSet descendants(NodeId id) const;
  [[nodiscard]] bool is_leaf(NodeId id) const;
  // True iff the parent is a List or Table node.
  [[nodiscard]] bool is_elem(NodeId id) const;
  [[nodiscard]] std::string node_text(NodeId id, bool whole_subtree) const;
  [[nodiscard]] std::size_t depth_of(NodeId id) const;

  // Position of a node in a pre-order walk; document order for node sets.
  [[nodiscard]] std::size_t order_of(NodeId id) const;
  void sort_document_order(NodeSet& nodes) const;

  // Nodes in pre-order.
  [[nodiscard]] std::vector<TreeNode> nodes_in_order() const;
  // Parent/child pairs, children grouped per parent in order, parents in pre-order.
  [[nodiscard]] std::vector<Edge> edges() const;
  [[nodiscard]] const std::string& source_uri() const noexcept { return source_uri_; }

  friend bool operator==(const Webpage& a, const Webpage& b);

 private:
  [[nodiscard]] std::size_t slot(NodeId id) const;

  std::vector<TreeNode> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> depth_;
  NodeId root_ = 0;
  std::string source_uri_;
};

using PagePtr = std::shared_ptr<const Webpage>;

// Lenient HTML ingestion into the header-nesting tree. Throws DecodeError on invalid UTF-8.
Webpage parse_html(std::string_view html, std::string source_uri = {});

class Corpus {
 public:
  // Throws ContractViolation on a duplicate id.
  void add(std::string id, PagePtr page);

  [[nodiscard]] std::size_t size() const noexcept { return pages_.size(); }
  [[nodiscard]] bool empty() const noexcept { return pages_.empty(); }
  [[nodiscard]] const std::string& id(std::size_t i) const { return ids_.at(i); }
  [[nodiscard]] const PagePtr& page(std::size_t i) const { return pages_.at(i); }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;
  // Throws LookupError when absent.
  [[nodiscard]] const PagePtr& at(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<PagePtr> pages_;
};

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(std::string_view json_text);

}  // namespace webqa
