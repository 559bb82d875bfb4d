#include "webqa/metrics.hpp"

#include "json.hpp"
#include "webqa/errors.hpp"

namespace webqa {

CountTriple counts(const TokenSet& predicted, const TokenSet& gold) {
  return {static_cast<std::int64_t>(predicted.intersection_size(gold)), static_cast<std::int64_t>(predicted.size()),
          static_cast<std::int64_t>(gold.size())};
}

CountTriple counts(const StringSet& predicted, const StringSet& gold) {
  return counts(tokenize_all(predicted), tokenize_all(gold));
}

Scores prf1(const CountTriple& c) {
  if (c.pred == 0 && c.gold == 0) return {1.0, 1.0, 1.0};
  Scores s;
  s.precision = c.pred == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.pred);
  s.recall = c.gold == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.gold);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

Example make_example(std::string id, PagePtr page, StringSet gold) {
  if (!page) throw ContractViolation("example " + id + " has no page");
  TokenSet tokens = tokenize_all(gold);
  return {std::move(id), std::move(page), std::move(gold), std::move(tokens)};
}

ProgramScore score_outputs(std::span<const StringSet> outputs, const ExampleSet& examples, bool pooled) {
  if (outputs.size() != examples.size()) throw ContractViolation("one output per example is required");
  ProgramScore result;
  TokenSet pooled_pred;
  TokenSet pooled_gold;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    TokenSet pred = tokenize_all(outputs[i]);
    result.per_example.push_back(counts(pred, examples.examples[i].gold_tokens));
    result.total += result.per_example.back();
    if (pooled) {
      pooled_pred.merge(pred);
      pooled_gold.merge(examples.examples[i].gold_tokens);
    }
  }
  if (pooled) result.total = counts(pooled_pred, pooled_gold);
  result.scores = prf1(result.total);
  return result;
}

ProgramScore f1_program(const dsl::Program& program, const ExampleSet& examples, const PredicateProvider& provider,
                        bool pooled) {
  std::vector<StringSet> outputs;
  outputs.reserve(examples.size());
  for (const auto& ex : examples.examples) outputs.push_back(dsl::eval_program(program, *ex.page, provider));
  return score_outputs(outputs, examples, pooled);
}

double recall_locator(const dsl::Locator& locator, const ExampleSet& examples, const PredicateProvider& provider,
                      bool pooled) {
  const QueryContext query = examples.query();
  std::vector<StringSet> located;
  for (const auto& ex : examples.examples) {
    const dsl::EvalEnv env{*ex.page, query, provider};
    located.push_back(dsl::extract_content(dsl::eval_locator(locator, env), *ex.page));
  }
  return score_outputs(located, examples, pooled).scores.recall;
}

double ub(double recall) {
  if (!(recall >= 0.0 && recall <= 1.0)) throw ContractViolation("recall must lie in [0, 1]");
  return 2.0 * recall / (1.0 + recall);
}

double recall_extractor(const dsl::Extractor& extractor, std::span<const LocatedExample> examples,
                        const QueryContext& query, const PredicateProvider& provider) {
  CountTriple total;
  for (const auto& ex : examples) {
    const dsl::EvalEnv env{*ex.page, query, provider};
    total += counts(tokenize_all(dsl::eval_extractor(extractor, ex.nodes, env)), ex.gold_tokens);
  }
  return prf1(total).recall;
}

double ub_extractor(const dsl::Extractor& extractor, std::span<const LocatedExample> examples,
                    const QueryContext& query, const PredicateProvider& provider) {
  return ub(recall_extractor(extractor, examples, query, provider));
}

std::size_t hamming(const TokenSet& a, const TokenSet& b) { return a.symmetric_difference_size(b); }

std::size_t hamming(const StringSet& a, const StringSet& b) { return hamming(tokenize_all(a), tokenize_all(b)); }

std::string evaluation_report_json(const ExampleSet& examples, const ProgramScore& score) {
  using nlohmann::json;
  json per = json::array();
  for (std::size_t i = 0; i < score.per_example.size(); ++i) {
    const Scores s = prf1(score.per_example[i]);
    per.push_back({{"id", examples.examples.at(i).id}, {"p", s.precision}, {"r", s.recall}, {"f1", s.f1}});
  }
  json report{{"per_example", per},
              {"micro", {{"p", score.scores.precision}, {"r", score.scores.recall}, {"f1", score.scores.f1}}}};
  return report.dump(2) + "\n";
}

}  // namespace webqa
