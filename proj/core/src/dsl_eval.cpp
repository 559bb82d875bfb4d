#include <algorithm>

#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"

namespace webqa::dsl {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view space = " \t\n\r\f\v";
  const auto first = s.find_first_not_of(space);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(space);
  return s.substr(first, last - first + 1);
}

}  // namespace

bool eval_pred(const Pred& pred, std::string_view text, const QueryContext& query,
               const PredicateProvider& provider) {
  switch (pred.op()) {
    case Pred::Op::True:
      return true;
    case Pred::Op::Atom:
      return provider.evaluate(text, pred.kind(), query).holds;
    case Pred::Op::Not:
      return !eval_pred(pred.operands()[0], text, query, provider);
    case Pred::Op::And:
      return eval_pred(pred.operands()[0], text, query, provider) &&
             eval_pred(pred.operands()[1], text, query, provider);
    case Pred::Op::Or:
      return eval_pred(pred.operands()[0], text, query, provider) ||
             eval_pred(pred.operands()[1], text, query, provider);
  }
  return false;
}

bool eval_node_filter(const NodeFilter& filter, const EvalEnv& env, NodeId node) {
  switch (filter.op()) {
    case NodeFilter::Op::True:
      return true;
    case NodeFilter::Op::IsLeaf:
      return env.page.is_leaf(node);
    case NodeFilter::Op::IsElem:
      return env.page.is_elem(node);
    case NodeFilter::Op::MatchText:
      return eval_pred(filter.pred(), env.page.node_text(node, filter.whole_subtree()), env.query, env.provider);
    case NodeFilter::Op::Not:
      return !eval_node_filter(filter.operands()[0], env, node);
    case NodeFilter::Op::And:
      return eval_node_filter(filter.operands()[0], env, node) && eval_node_filter(filter.operands()[1], env, node);
    case NodeFilter::Op::Or:
      return eval_node_filter(filter.operands()[0], env, node) || eval_node_filter(filter.operands()[1], env, node);
  }
  return false;
}

NodeSet apply_locator_step(const Locator& locator, const NodeSet& inner_nodes, const EvalEnv& env) {
  NodeSet out;
  for (NodeId n : inner_nodes) {
    if (locator.op() == Locator::Op::Children) {
      for (NodeId c : env.page.children(n)) {
        if (eval_node_filter(locator.filter(), env, c)) out.push_back(c);
      }
    } else if (locator.op() == Locator::Op::Descendants) {
      for (NodeId d : env.page.descendants(n)) {
        if (eval_node_filter(locator.filter(), env, d)) out.push_back(d);
      }
    } else {
      return NodeSet{env.page.root()};
    }
  }
  env.page.sort_document_order(out);
  return out;
}

NodeSet eval_locator(const Locator& locator, const EvalEnv& env) {
  if (locator.op() == Locator::Op::Root) return NodeSet{env.page.root()};
  return apply_locator_step(locator, eval_locator(locator.inner(), env), env);
}

bool guard_holds(const Guard& guard, const NodeSet& nodes, const EvalEnv& env) {
  if (guard.op() == Guard::Op::IsSingleton) return nodes.size() == 1;
  return std::any_of(nodes.begin(), nodes.end(), [&](NodeId n) {
    return eval_pred(guard.pred(), env.page.node(n).text, env.query, env.provider);
  });
}

GuardResult eval_guard(const Guard& guard, const EvalEnv& env) {
  GuardResult result;
  result.nodes = eval_locator(guard.locator(), env);
  result.holds = guard_holds(guard, result.nodes, env);
  return result;
}

StringSet extract_content(const NodeSet& nodes, const Webpage& page) {
  std::vector<std::string> texts;
  for (NodeId n : nodes) {
    const std::string& t = page.node(n).text;
    if (!t.empty()) texts.push_back(t);
  }
  return StringSet(std::move(texts));
}

StringSet apply_extractor_step(const Extractor& extractor, const StringSet& inner_value, const QueryContext& query,
                               const PredicateProvider& provider) {
  std::vector<std::string> out;
  switch (extractor.op()) {
    case Extractor::Op::Content:
      return inner_value;
    case Extractor::Op::Substring: {
      const Pred& pred = extractor.pred();
      if (pred.op() == Pred::Op::True) return inner_value;
      if (pred.op() != Pred::Op::Atom) {
        throw ContractViolation("Substring is defined only for atomic predicates: " + pred.canonical());
      }
      for (const auto& s : inner_value) {
        for (auto& span : provider.extract_spans(s, pred.kind(), query, static_cast<std::size_t>(extractor.k()))) {
          out.push_back(std::move(span.text));
        }
      }
      break;
    }
    case Extractor::Op::Filter:
      for (const auto& s : inner_value) {
        if (eval_pred(extractor.pred(), s, query, provider)) out.push_back(s);
      }
      break;
    case Extractor::Op::Split: {
      const std::string& delim = extractor.delimiter();
      for (const auto& s : inner_value) {
        std::size_t begin = 0;
        while (true) {
          const std::size_t at = s.find(delim, begin);
          const std::string_view piece = trim(std::string_view(s).substr(begin, at == std::string::npos ? std::string::npos : at - begin));
          if (!piece.empty()) out.emplace_back(piece);
          if (at == std::string::npos) break;
          begin = at + delim.size();
        }
      }
      break;
    }
  }
  return StringSet(std::move(out));
}

StringSet eval_extractor(const Extractor& extractor, const NodeSet& nodes, const EvalEnv& env) {
  if (extractor.op() == Extractor::Op::Content) return extract_content(nodes, env.page);
  return apply_extractor_step(extractor, eval_extractor(extractor.inner(), nodes, env), env.query, env.provider);
}

StringSet eval_program(const Program& program, const Webpage& page, const PredicateProvider& provider) {
  const QueryContext query = program.query();
  const EvalEnv env{page, query, provider};
  for (const auto& branch : program.branches) {
    GuardResult g = eval_guard(branch.guard, env);
    if (g.holds) return eval_extractor(branch.extractor, g.nodes, env);
  }
  return {};
}

}  // namespace webqa::dsl
