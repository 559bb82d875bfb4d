#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <optional>

#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"

namespace webqa {

StringSet::StringSet(std::initializer_list<std::string> items) : StringSet(std::vector<std::string>(items)) {}

StringSet::StringSet(std::vector<std::string> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool StringSet::contains(std::string_view s) const { return std::binary_search(items_.begin(), items_.end(), s); }

namespace dsl {
namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string number(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

std::string node_json(std::string_view op, const std::vector<std::string>& args) {
  std::string out = "{\"op\":\"";
  out.append(op);
  out += "\",\"args\":[";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += args[i];
  }
  out += "]}";
  return out;
}

[[noreturn]] void wrong_op(const char* what) { throw ContractViolation(std::string("AST accessor misuse: ") + what); }

}  // namespace

// ---- Pred ----

struct Pred::Node {
  Op op;
  PredicateKind kind;
  std::vector<Pred> operands;
  std::string canonical;
  std::size_t size;
  std::size_t atoms;
};

Pred Pred::top() {
  return Pred(std::make_shared<const Node>(Node{Op::True, {}, {}, node_json("true", {}), 1, 0}));
}

Pred Pred::atom(PredicateKind kind) {
  std::string text;
  switch (kind.tag) {
    case PredicateKind::Tag::KeywordMatch:
      if (!(kind.threshold >= 0.0 && kind.threshold <= 1.0)) {
        throw ContractViolation("matchKeyword threshold must lie in [0, 1]");
      }
      text = node_json("matchKeyword", {number(kind.threshold)});
      break;
    case PredicateKind::Tag::HasAnswer:
      text = node_json("hasAnswer", {});
      break;
    case PredicateKind::Tag::HasEntity:
      if (kind.label.empty()) throw ContractViolation("hasEntity needs a label");
      text = node_json("hasEntity", {quote(kind.label)});
      break;
  }
  return Pred(std::make_shared<const Node>(Node{Op::Atom, std::move(kind), {}, std::move(text), 1, 1}));
}

Pred Pred::negate(Pred inner) {
  std::string text = node_json("not", {inner.canonical()});
  const std::size_t size = inner.size() + 1;
  const std::size_t atoms = inner.atom_count();
  return Pred(std::make_shared<const Node>(Node{Op::Not, {}, {std::move(inner)}, std::move(text), size, atoms}));
}

Pred Pred::both(Pred lhs, Pred rhs) {
  std::string text = node_json("and", {lhs.canonical(), rhs.canonical()});
  const std::size_t size = lhs.size() + rhs.size() + 1;
  const std::size_t atoms = lhs.atom_count() + rhs.atom_count();
  return Pred(std::make_shared<const Node>(
      Node{Op::And, {}, {std::move(lhs), std::move(rhs)}, std::move(text), size, atoms}));
}

Pred Pred::either(Pred lhs, Pred rhs) {
  std::string text = node_json("or", {lhs.canonical(), rhs.canonical()});
  const std::size_t size = lhs.size() + rhs.size() + 1;
  const std::size_t atoms = lhs.atom_count() + rhs.atom_count();
  return Pred(std::make_shared<const Node>(
      Node{Op::Or, {}, {std::move(lhs), std::move(rhs)}, std::move(text), size, atoms}));
}

Pred::Op Pred::op() const { return node_->op; }
const PredicateKind& Pred::kind() const {
  if (node_->op != Op::Atom) wrong_op("Pred::kind on a non-atom");
  return node_->kind;
}
const std::vector<Pred>& Pred::operands() const { return node_->operands; }
const std::string& Pred::canonical() const { return node_->canonical; }
std::size_t Pred::size() const { return node_->size; }
std::size_t Pred::atom_count() const { return node_->atoms; }

// ---- NodeFilter ----

struct NodeFilter::Node {
  Op op;
  std::optional<Pred> pred;
  bool whole_subtree;
  std::vector<NodeFilter> operands;
  std::string canonical;
  std::size_t size;
  std::size_t atoms;
};

NodeFilter NodeFilter::top() {
  return NodeFilter(std::make_shared<const Node>(Node{Op::True, {}, false, {}, node_json("true", {}), 1, 0}));
}

NodeFilter NodeFilter::is_leaf() {
  return NodeFilter(std::make_shared<const Node>(Node{Op::IsLeaf, {}, false, {}, node_json("isLeaf", {}), 1, 1}));
}

NodeFilter NodeFilter::is_elem() {
  return NodeFilter(std::make_shared<const Node>(Node{Op::IsElem, {}, false, {}, node_json("isElem", {}), 1, 1}));
}

NodeFilter NodeFilter::match_text(Pred pred, bool whole_subtree) {
  std::string text = node_json("matchText", {pred.canonical(), whole_subtree ? "true" : "false"});
  const std::size_t size = pred.size() + 1;
  return NodeFilter(
      std::make_shared<const Node>(Node{Op::MatchText, std::move(pred), whole_subtree, {}, std::move(text), size, 1}));
}

NodeFilter NodeFilter::negate(NodeFilter inner) {
  std::string text = node_json("not", {inner.canonical()});
  const std::size_t size = inner.size() + 1;
  const std::size_t atoms = inner.atom_count();
  return NodeFilter(
      std::make_shared<const Node>(Node{Op::Not, {}, false, {std::move(inner)}, std::move(text), size, atoms}));
}

NodeFilter NodeFilter::both(NodeFilter lhs, NodeFilter rhs) {
  std::string text = node_json("and", {lhs.canonical(), rhs.canonical()});
  const std::size_t size = lhs.size() + rhs.size() + 1;
  const std::size_t atoms = lhs.atom_count() + rhs.atom_count();
  return NodeFilter(std::make_shared<const Node>(
      Node{Op::And, {}, false, {std::move(lhs), std::move(rhs)}, std::move(text), size, atoms}));
}

NodeFilter NodeFilter::either(NodeFilter lhs, NodeFilter rhs) {
  std::string text = node_json("or", {lhs.canonical(), rhs.canonical()});
  const std::size_t size = lhs.size() + rhs.size() + 1;
  const std::size_t atoms = lhs.atom_count() + rhs.atom_count();
  return NodeFilter(std::make_shared<const Node>(
      Node{Op::Or, {}, false, {std::move(lhs), std::move(rhs)}, std::move(text), size, atoms}));
}

NodeFilter::Op NodeFilter::op() const { return node_->op; }
const Pred& NodeFilter::pred() const {
  if (!node_->pred) wrong_op("NodeFilter::pred on a non-matchText filter");
  return *node_->pred;
}
bool NodeFilter::whole_subtree() const { return node_->whole_subtree; }
const std::vector<NodeFilter>& NodeFilter::operands() const { return node_->operands; }
const std::string& NodeFilter::canonical() const { return node_->canonical; }
std::size_t NodeFilter::size() const { return node_->size; }
std::size_t NodeFilter::atom_count() const { return node_->atoms; }

// ---- Locator ----

struct Locator::Node {
  Op op;
  std::optional<Locator> inner;
  std::optional<NodeFilter> filter;
  std::string canonical;
  std::size_t depth;
  std::size_t size;
};

Locator Locator::root() {
  return Locator(std::make_shared<const Node>(Node{Op::Root, {}, {}, node_json("GetRoot", {}), 1, 1}));
}

Locator Locator::children(Locator inner, NodeFilter filter) {
  std::string text = node_json("GetChildren", {inner.canonical(), filter.canonical()});
  const std::size_t depth = inner.depth() + 1;
  const std::size_t size = inner.size() + filter.size() + 1;
  return Locator(std::make_shared<const Node>(
      Node{Op::Children, std::move(inner), std::move(filter), std::move(text), depth, size}));
}

Locator Locator::descendants(Locator inner, NodeFilter filter) {
  std::string text = node_json("GetDescendants", {inner.canonical(), filter.canonical()});
  const std::size_t depth = inner.depth() + 1;
  const std::size_t size = inner.size() + filter.size() + 1;
  return Locator(std::make_shared<const Node>(
      Node{Op::Descendants, std::move(inner), std::move(filter), std::move(text), depth, size}));
}

Locator::Op Locator::op() const { return node_->op; }
const Locator& Locator::inner() const {
  if (!node_->inner) wrong_op("Locator::inner on GetRoot");
  return *node_->inner;
}
const NodeFilter& Locator::filter() const {
  if (!node_->filter) wrong_op("Locator::filter on GetRoot");
  return *node_->filter;
}
const std::string& Locator::canonical() const { return node_->canonical; }
std::size_t Locator::depth() const { return node_->depth; }
std::size_t Locator::size() const { return node_->size; }

// ---- Guard ----

struct Guard::Node {
  Op op;
  Locator locator;
  std::optional<Pred> pred;
  std::string canonical;
  std::size_t size;
};

Guard Guard::sat(Locator locator, Pred pred) {
  std::string text = node_json("Sat", {locator.canonical(), pred.canonical()});
  const std::size_t size = locator.size() + pred.size() + 1;
  return Guard(std::make_shared<const Node>(Node{Op::Sat, std::move(locator), std::move(pred), std::move(text), size}));
}

Guard Guard::is_singleton(Locator locator) {
  std::string text = node_json("IsSingleton", {locator.canonical()});
  const std::size_t size = locator.size() + 1;
  return Guard(std::make_shared<const Node>(Node{Op::IsSingleton, std::move(locator), {}, std::move(text), size}));
}

Guard::Op Guard::op() const { return node_->op; }
const Locator& Guard::locator() const { return node_->locator; }
const Pred& Guard::pred() const {
  if (!node_->pred) wrong_op("Guard::pred on IsSingleton");
  return *node_->pred;
}
const std::string& Guard::canonical() const { return node_->canonical; }
std::size_t Guard::depth() const { return node_->locator.depth() + 1; }
std::size_t Guard::size() const { return node_->size; }

// ---- Extractor ----

struct Extractor::Node {
  Op op;
  std::optional<Extractor> inner;
  std::optional<Pred> pred;
  int k;
  std::string delimiter;
  std::string canonical;
  std::size_t depth;
  std::size_t size;
};

Extractor Extractor::content() {
  return Extractor(std::make_shared<const Node>(Node{Op::Content, {}, {}, 0, {}, node_json("ExtractContent", {}), 1, 1}));
}

Extractor Extractor::substring(Extractor inner, Pred pred, int k) {
  if (k < 1) throw ContractViolation("Substring needs k >= 1");
  std::string text = node_json("Substring", {inner.canonical(), pred.canonical(), std::to_string(k)});
  const std::size_t depth = inner.depth() + 1;
  const std::size_t size = inner.size() + pred.size() + 1;
  return Extractor(std::make_shared<const Node>(
      Node{Op::Substring, std::move(inner), std::move(pred), k, {}, std::move(text), depth, size}));
}

Extractor Extractor::filter(Extractor inner, Pred pred) {
  std::string text = node_json("Filter", {inner.canonical(), pred.canonical()});
  const std::size_t depth = inner.depth() + 1;
  const std::size_t size = inner.size() + pred.size() + 1;
  return Extractor(std::make_shared<const Node>(
      Node{Op::Filter, std::move(inner), std::move(pred), 0, {}, std::move(text), depth, size}));
}

Extractor Extractor::split(Extractor inner, std::string delimiter) {
  if (delimiter.empty()) throw ContractViolation("Split needs a non-empty delimiter");
  std::string text = node_json("Split", {inner.canonical(), quote(delimiter)});
  const std::size_t depth = inner.depth() + 1;
  const std::size_t size = inner.size() + 1;
  return Extractor(std::make_shared<const Node>(
      Node{Op::Split, std::move(inner), {}, 0, std::move(delimiter), std::move(text), depth, size}));
}

Extractor::Op Extractor::op() const { return node_->op; }
const Extractor& Extractor::inner() const {
  if (!node_->inner) wrong_op("Extractor::inner on ExtractContent");
  return *node_->inner;
}
const Pred& Extractor::pred() const {
  if (!node_->pred) wrong_op("Extractor::pred without a predicate");
  return *node_->pred;
}
int Extractor::k() const { return node_->k; }
const std::string& Extractor::delimiter() const { return node_->delimiter; }
const std::string& Extractor::canonical() const { return node_->canonical; }
std::size_t Extractor::depth() const { return node_->depth; }
std::size_t Extractor::size() const { return node_->size; }

// ---- Program ----

std::size_t Program::size() const {
  std::size_t n = 0;
  for (const auto& b : branches) n += b.guard.size() + b.extractor.size();
  return n;
}

Locator get_leaves(Locator inner) { return Locator::descendants(std::move(inner), NodeFilter::is_leaf()); }

Extractor get_entity(Extractor inner, std::string label) {
  return Extractor::substring(std::move(inner), Pred::atom(PredicateKind::entity(std::move(label))), 1);
}

std::string canonical_serialize(const Program& program) {
  std::string out = "{\"question\":" + quote(program.question) + ",\"keywords\":[";
  for (std::size_t i = 0; i < program.keywords.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += quote(program.keywords[i]);
  }
  out += "],\"branches\":[";
  for (std::size_t i = 0; i < program.branches.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += "{\"guard\":" + program.branches[i].guard.canonical() +
           ",\"extractor\":" + program.branches[i].extractor.canonical() + "}";
  }
  out += "]}";
  return out;
}

void validate(const Program& program, const AstBounds& bounds) {
  auto check_pred = [&](const Pred& p) {
    if (p.atom_count() > bounds.max_pred_atoms) {
      throw ContractViolation("predicate " + p.canonical() + " exceeds the atom bound");
    }
  };
  std::function<void(const Locator&)> check_locator = [&](const Locator& l) {
    if (l.op() == Locator::Op::Root) return;
    if (l.filter().atom_count() > bounds.max_filter_atoms) {
      throw ContractViolation("node filter " + l.filter().canonical() + " exceeds the atom bound");
    }
    std::function<void(const NodeFilter&)> walk = [&](const NodeFilter& f) {
      if (f.op() == NodeFilter::Op::MatchText) check_pred(f.pred());
      for (const auto& o : f.operands()) walk(o);
    };
    walk(l.filter());
    check_locator(l.inner());
  };
  if (program.branches.empty()) throw ContractViolation("a program needs at least one branch");
  for (const auto& b : program.branches) {
    if (b.guard.locator().depth() > bounds.max_locator_depth) {
      throw ContractViolation("locator deeper than the guard depth limit");
    }
    if (b.extractor.depth() > bounds.max_extractor_depth) {
      throw ContractViolation("extractor deeper than the extractor depth limit");
    }
    check_locator(b.guard.locator());
    if (b.guard.op() == Guard::Op::Sat) check_pred(b.guard.pred());
    for (Extractor e = b.extractor; e.op() != Extractor::Op::Content; e = e.inner()) {
      if (e.op() == Extractor::Op::Substring || e.op() == Extractor::Op::Filter) check_pred(e.pred());
    }
  }
}

}  // namespace dsl
}  // namespace webqa
