#include <array>

#include "json.hpp"
#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"

namespace webqa::dsl {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 21> kCoreOps = {
    "true",        "not",          "and",        "or",          "matchKeyword",   "hasAnswer",
    "hasEntity",   "isLeaf",       "isElem",     "matchText",   "GetRoot",        "GetChildren",
    "GetDescendants", "Sat",       "IsSingleton", "ExtractContent", "Substring",   "Filter",
    "Split",       "GetLeaves",    "GetEntity"};

[[noreturn]] void bad(const std::string& what, const json& j) {
  throw ContractViolation("malformed program AST (" + what + "): " + j.dump());
}

const std::string& op_of(const json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) bad("expected an {op, args} node", j);
  return j["op"].get_ref<const std::string&>();
}

const json& args_of(const json& j, std::size_t expected) {
  static const json empty = json::array();
  if (!j.contains("args")) {
    if (expected == 0) return empty;
    bad("missing args", j);
  }
  const json& a = j["args"];
  if (!a.is_array() || a.size() != expected) bad("wrong number of args", j);
  return a;
}

json expand(const json& j) {
  if (!j.is_object()) return j;
  const std::string& op = op_of(j);
  if (std::find(kCoreOps.begin(), kCoreOps.end(), op) == kCoreOps.end()) {
    throw ContractViolation("unknown AST operator or sugar '" + op + "'");
  }
  json args = json::array();
  if (j.contains("args")) {
    if (!j["args"].is_array()) bad("args must be an array", j);
    for (const auto& a : j["args"]) args.push_back(expand(a));
  }
  if (op == "GetLeaves") {
    if (args.size() != 1) bad("GetLeaves takes one argument", j);
    return json{{"op", "GetDescendants"}, {"args", {args[0], json{{"op", "isLeaf"}, {"args", json::array()}}}}};
  }
  if (op == "GetEntity") {
    if (args.size() != 2 || !args[1].is_string()) bad("GetEntity takes an extractor and a label", j);
    return json{{"op", "Substring"},
                {"args", {args[0], json{{"op", "hasEntity"}, {"args", {args[1]}}}, 1}}};
  }
  return json{{"op", op}, {"args", std::move(args)}};
}

Pred pred_from(const json& j) {
  const std::string& op = op_of(j);
  if (op == "true") return (void)args_of(j, 0), Pred::top();
  if (op == "matchKeyword") {
    const json& a = args_of(j, 1);
    if (!a[0].is_number()) bad("threshold must be a number", j);
    return Pred::atom(PredicateKind::keyword(a[0].get<double>()));
  }
  if (op == "hasAnswer") return (void)args_of(j, 0), Pred::atom(PredicateKind::answer());
  if (op == "hasEntity") {
    const json& a = args_of(j, 1);
    if (!a[0].is_string()) bad("entity label must be a string", j);
    return Pred::atom(PredicateKind::entity(a[0].get<std::string>()));
  }
  if (op == "not") return Pred::negate(pred_from(args_of(j, 1)[0]));
  if (op == "and") {
    const json& a = args_of(j, 2);
    return Pred::both(pred_from(a[0]), pred_from(a[1]));
  }
  if (op == "or") {
    const json& a = args_of(j, 2);
    return Pred::either(pred_from(a[0]), pred_from(a[1]));
  }
  bad("expected an NLP predicate", j);
}

NodeFilter filter_from(const json& j) {
  const std::string& op = op_of(j);
  if (op == "true") return (void)args_of(j, 0), NodeFilter::top();
  if (op == "isLeaf") return (void)args_of(j, 0), NodeFilter::is_leaf();
  if (op == "isElem") return (void)args_of(j, 0), NodeFilter::is_elem();
  if (op == "matchText") {
    const json& a = args_of(j, 2);
    if (!a[1].is_boolean()) bad("matchText flag must be a boolean", j);
    return NodeFilter::match_text(pred_from(a[0]), a[1].get<bool>());
  }
  if (op == "not") return NodeFilter::negate(filter_from(args_of(j, 1)[0]));
  if (op == "and") {
    const json& a = args_of(j, 2);
    return NodeFilter::both(filter_from(a[0]), filter_from(a[1]));
  }
  if (op == "or") {
    const json& a = args_of(j, 2);
    return NodeFilter::either(filter_from(a[0]), filter_from(a[1]));
  }
  bad("expected a node filter", j);
}

Locator locator_from(const json& j) {
  const std::string& op = op_of(j);
  if (op == "GetRoot") return (void)args_of(j, 0), Locator::root();
  if (op == "GetChildren" || op == "GetDescendants") {
    const json& a = args_of(j, 2);
    Locator inner = locator_from(a[0]);
    NodeFilter filter = filter_from(a[1]);
    return op == "GetChildren" ? Locator::children(std::move(inner), std::move(filter))
                               : Locator::descendants(std::move(inner), std::move(filter));
  }
  bad("expected a section locator", j);
}

Guard guard_from(const json& j) {
  const std::string& op = op_of(j);
  if (op == "Sat") {
    const json& a = args_of(j, 2);
    return Guard::sat(locator_from(a[0]), pred_from(a[1]));
  }
  if (op == "IsSingleton") return Guard::is_singleton(locator_from(args_of(j, 1)[0]));
  bad("expected a guard", j);
}

Extractor extractor_from(const json& j) {
  const std::string& op = op_of(j);
  if (op == "ExtractContent") return (void)args_of(j, 0), Extractor::content();
  if (op == "Substring") {
    const json& a = args_of(j, 3);
    if (!a[2].is_number_integer()) bad("k must be an integer", j);
    return Extractor::substring(extractor_from(a[0]), pred_from(a[1]), a[2].get<int>());
  }
  if (op == "Filter") {
    const json& a = args_of(j, 2);
    return Extractor::filter(extractor_from(a[0]), pred_from(a[1]));
  }
  if (op == "Split") {
    const json& a = args_of(j, 2);
    if (!a[1].is_string()) bad("delimiter must be a string", j);
    return Extractor::split(extractor_from(a[0]), a[1].get<std::string>());
  }
  bad("expected an extractor", j);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string desugar(std::string_view ast_json) { return expand(parse_json(ast_json)).dump(); }

Program parse_program(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object() || !doc.contains("branches") || !doc["branches"].is_array()) {
    throw ContractViolation("program must be an object with a branches array");
  }
  Program program;
  try {
    program.question = doc.value("question", std::string());
    if (doc.contains("keywords")) program.keywords = doc["keywords"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("bad program header: ") + e.what());
  }
  for (const auto& b : doc["branches"]) {
    if (!b.is_object() || !b.contains("guard") || !b.contains("extractor")) {
      throw ContractViolation("each branch needs a guard and an extractor");
    }
    program.branches.push_back(Branch{guard_from(expand(b["guard"])), extractor_from(expand(b["extractor"]))});
  }
  if (program.branches.empty()) throw ContractViolation("a program needs at least one branch");
  return program;
}

std::string program_to_json(const Program& program, int indent) {
  return json::parse(canonical_serialize(program)).dump(indent);
}

Locator parse_locator(std::string_view json_text) { return locator_from(expand(parse_json(json_text))); }
Extractor parse_extractor(std::string_view json_text) { return extractor_from(expand(parse_json(json_text))); }
Guard parse_guard(std::string_view json_text) { return guard_from(expand(parse_json(json_text))); }

}  // namespace webqa::dsl
