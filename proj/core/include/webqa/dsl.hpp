#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "webqa/nlp.hpp"
#include "webqa/webtree.hpp"

namespace webqa {

// Sorted, duplicate-free set of extracted strings.
class StringSet {
 public:
  StringSet() = default;
  StringSet(std::initializer_list<std::string> items);
  explicit StringSet(std::vector<std::string> items);

  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
  [[nodiscard]] const std::vector<std::string>& items() const noexcept { return items_; }
  [[nodiscard]] auto begin() const noexcept { return items_.begin(); }
  [[nodiscard]] auto end() const noexcept { return items_.end(); }
  [[nodiscard]] bool contains(std::string_view s) const;

  friend bool operator==(const StringSet&, const StringSet&) = default;
  friend auto operator<=>(const StringSet&, const StringSet&) = default;

 private:
  std::vector<std::string> items_;
};

namespace dsl {

// String-level formula: the body of a λz.φ.
class Pred {
 public:
  enum class Op { True, Atom, Not, And, Or };

  static Pred top();
  static Pred atom(PredicateKind kind);
  static Pred negate(Pred inner);
  static Pred both(Pred lhs, Pred rhs);
  static Pred either(Pred lhs, Pred rhs);

  [[nodiscard]] Op op() const;
  [[nodiscard]] const PredicateKind& kind() const;  // Atom only
  [[nodiscard]] const std::vector<Pred>& operands() const;
  [[nodiscard]] const std::string& canonical() const;
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::size_t atom_count() const;

  friend bool operator==(const Pred& a, const Pred& b) { return a.canonical() == b.canonical(); }

 private:
  struct Node;
  explicit Pred(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Node-level formula used by locators.
class NodeFilter {
 public:
  enum class Op { True, IsLeaf, IsElem, MatchText, Not, And, Or };

  static NodeFilter top();
  static NodeFilter is_leaf();
  static NodeFilter is_elem();
  static NodeFilter match_text(Pred pred, bool whole_subtree);
  static NodeFilter negate(NodeFilter inner);
  static NodeFilter both(NodeFilter lhs, NodeFilter rhs);
  static NodeFilter either(NodeFilter lhs, NodeFilter rhs);

  [[nodiscard]] Op op() const;
  [[nodiscard]] const Pred& pred() const;  // MatchText only
  [[nodiscard]] bool whole_subtree() const;  // MatchText only
  [[nodiscard]] const std::vector<NodeFilter>& operands() const;
  [[nodiscard]] const std::string& canonical() const;
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::size_t atom_count() const;

  friend bool operator==(const NodeFilter& a, const NodeFilter& b) { return a.canonical() == b.canonical(); }

 private:
  struct Node;
  explicit NodeFilter(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Locator {
 public:
  enum class Op { Root, Children, Descendants };

  static Locator root();
  static Locator children(Locator inner, NodeFilter filter);
  static Locator descendants(Locator inner, NodeFilter filter);

  [[nodiscard]] Op op() const;
  [[nodiscard]] const Locator& inner() const;  // not Root
  [[nodiscard]] const NodeFilter& filter() const;  // not Root
  [[nodiscard]] const std::string& canonical() const;
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Locator& a, const Locator& b) { return a.canonical() == b.canonical(); }

 private:
  struct Node;
  explicit Locator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Guard {
 public:
  enum class Op { Sat, IsSingleton };

  static Guard sat(Locator locator, Pred pred);
  static Guard is_singleton(Locator locator);

  [[nodiscard]] Op op() const;
  [[nodiscard]] const Locator& locator() const;
  [[nodiscard]] const Pred& pred() const;  // Sat only
  [[nodiscard]] const std::string& canonical() const;
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Guard& a, const Guard& b) { return a.canonical() == b.canonical(); }

 private:
  struct Node;
  explicit Guard(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Extractor {
 public:
  enum class Op { Content, Substring, Filter, Split };

  static Extractor content();
  static Extractor substring(Extractor inner, Pred pred, int k);
  static Extractor filter(Extractor inner, Pred pred);
  static Extractor split(Extractor inner, std::string delimiter);

  [[nodiscard]] Op op() const;
  [[nodiscard]] const Extractor& inner() const;  // not Content
  [[nodiscard]] const Pred& pred() const;  // Substring and Filter
  [[nodiscard]] int k() const;  // Substring only
  [[nodiscard]] const std::string& delimiter() const;  // Split only
  [[nodiscard]] const std::string& canonical() const;
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Extractor& a, const Extractor& b) { return a.canonical() == b.canonical(); }

 private:
  struct Node;
  explicit Extractor(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Branch {
  Guard guard;
  Extractor extractor;

  friend bool operator==(const Branch&, const Branch&) = default;
};

struct Program {
  std::vector<Branch> branches;
  std::string question;
  std::vector<std::string> keywords;

  [[nodiscard]] QueryContext query() const { return {question, keywords}; }
  [[nodiscard]] std::size_t size() const;

  friend bool operator==(const Program&, const Program&) = default;
};

// Sugar: GetLeaves(ν) and GetEntity(e, label).
Locator get_leaves(Locator inner);
Extractor get_entity(Extractor inner, std::string label);

// Expands GetLeaves/GetEntity anywhere inside a JSON AST; returns the core AST as compact JSON.
// Throws ContractViolation on unknown operators.
std::string desugar(std::string_view ast_json);

// Compact canonical JSON, stable across runs; equal programs give equal strings.
std::string canonical_serialize(const Program& program);
// Accepts canonical strings and program files, with or without sugar.
Program parse_program(std::string_view json_text);
// Human-oriented, indented program file.
std::string program_to_json(const Program& program, int indent = 2);

Locator parse_locator(std::string_view json_text);
Extractor parse_extractor(std::string_view json_text);
Guard parse_guard(std::string_view json_text);

// Upper limits on formula sizes inside predicates and node filters.
struct AstBounds {
  std::size_t max_pred_atoms = 3;
  std::size_t max_filter_atoms = 2;
  std::size_t max_locator_depth = 7;
  std::size_t max_extractor_depth = 5;
};

// Throws ContractViolation when the program exceeds the bounds.
void validate(const Program& program, const AstBounds& bounds);

// ---- interpreter ----

struct EvalEnv {
  const Webpage& page;
  const QueryContext& query;
  const PredicateProvider& provider;
};

struct GuardResult {
  bool holds = false;
  NodeSet nodes;
};

bool eval_pred(const Pred& pred, std::string_view text, const QueryContext& query,
               const PredicateProvider& provider);
bool eval_node_filter(const NodeFilter& filter, const EvalEnv& env, NodeId node);
NodeSet eval_locator(const Locator& locator, const EvalEnv& env);
// Applies only the outermost locator production to an already evaluated inner node set.
NodeSet apply_locator_step(const Locator& locator, const NodeSet& inner_nodes, const EvalEnv& env);
GuardResult eval_guard(const Guard& guard, const EvalEnv& env);
// Guard test against a node set that was computed elsewhere.
bool guard_holds(const Guard& guard, const NodeSet& nodes, const EvalEnv& env);
StringSet eval_extractor(const Extractor& extractor, const NodeSet& nodes, const EvalEnv& env);
StringSet extract_content(const NodeSet& nodes, const Webpage& page);
// Applies only the outermost extractor production to an already evaluated inner value.
StringSet apply_extractor_step(const Extractor& extractor, const StringSet& inner_value,
                               const QueryContext& query, const PredicateProvider& provider);
StringSet eval_program(const Program& program, const Webpage& page, const PredicateProvider& provider);

}  // namespace dsl
}  // namespace webqa
