#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "webqa/dsl.hpp"
#include "webqa/text.hpp"
#include "webqa/webtree.hpp"

namespace webqa {

// Token counts for one example, or a sum over several.
struct CountTriple {
  std::int64_t tp = 0;
  std::int64_t pred = 0;
  std::int64_t gold = 0;

  CountTriple& operator+=(const CountTriple& other) {
    tp += other.tp;
    pred += other.pred;
    gold += other.gold;
    return *this;
  }
  friend CountTriple operator+(CountTriple a, const CountTriple& b) { return a += b; }
  friend auto operator<=>(const CountTriple&, const CountTriple&) = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

CountTriple counts(const TokenSet& predicted, const TokenSet& gold);
CountTriple counts(const StringSet& predicted, const StringSet& gold);
Scores prf1(const CountTriple& c);

struct Example {
  std::string id;
  PagePtr page;
  StringSet gold;
  TokenSet gold_tokens;  // tokenize_all(gold)
};

Example make_example(std::string id, PagePtr page, StringSet gold);

struct ExampleSet {
  std::string question;
  std::vector<std::string> keywords;
  std::vector<Example> examples;

  [[nodiscard]] QueryContext query() const { return {question, keywords}; }
  [[nodiscard]] std::size_t size() const noexcept { return examples.size(); }
};

struct ProgramScore {
  Scores scores;
  CountTriple total;
  std::vector<CountTriple> per_example;
};

// Micro-averaged score. With `pooled`, token sets are unioned across pages before counting.
ProgramScore f1_program(const dsl::Program& program, const ExampleSet& examples, const PredicateProvider& provider,
                        bool pooled = false);
ProgramScore score_outputs(std::span<const StringSet> outputs, const ExampleSet& examples, bool pooled = false);

// Fraction of gold tokens covered by the own text of the located nodes.
double recall_locator(const dsl::Locator& locator, const ExampleSet& examples, const PredicateProvider& provider,
                      bool pooled = false);

// Best F1 reachable at the given recall. Throws ContractViolation outside [0, 1].
double ub(double recall);

// An example after its section locator has run.
struct LocatedExample {
  PagePtr page;
  NodeSet nodes;
  TokenSet gold_tokens;
};

double recall_extractor(const dsl::Extractor& extractor, std::span<const LocatedExample> examples,
                        const QueryContext& query, const PredicateProvider& provider);
double ub_extractor(const dsl::Extractor& extractor, std::span<const LocatedExample> examples,
                    const QueryContext& query, const PredicateProvider& provider);

// Size of the symmetric difference of the two token sets.
std::size_t hamming(const StringSet& a, const StringSet& b);
std::size_t hamming(const TokenSet& a, const TokenSet& b);

// {"per_example":[{"id","p","r","f1"}],"micro":{"p","r","f1"}}
std::string evaluation_report_json(const ExampleSet& examples, const ProgramScore& score);

}  // namespace webqa
