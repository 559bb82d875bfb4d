#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "webqa/dsl.hpp"
#include "webqa/nlp.hpp"

namespace webqa {

// The finite slice of the DSL explored by synthesis.
struct GrammarConfig {
  // NLP atoms used by guards, Substring and Filter.
  std::vector<PredicateKind> atoms;
  // NLP atoms used inside matchText node filters; defaults to `atoms`.
  std::optional<std::vector<PredicateKind>> filter_atoms;

  std::vector<int> k_grid{1, 2, 3};
  std::vector<std::string> delimiters{",", ";", "\n", "|"};

  // Guard depth counts the guard itself, so locators reach depth guard_depth - 1.
  std::size_t guard_depth = 7;
  std::size_t extractor_depth = 5;

  bool guard_negation = true;
  bool guard_pairs = true;
  bool filter_negation = true;
  bool filter_pairs = false;

  [[nodiscard]] const std::vector<PredicateKind>& node_filter_atoms() const {
    return filter_atoms ? *filter_atoms : atoms;
  }
};

// Thresholds step, 2*step, ..., 1.0 rounded to two decimals. Zero is left out: it makes
// matchKeyword equivalent to ⊤.
std::vector<double> threshold_grid(double step);

// Keyword atoms for each threshold, then hasAnswer, then one hasEntity per label.
std::vector<PredicateKind> atom_grid(const std::vector<double>& thresholds, bool with_keywords, bool with_answer,
                                     const std::vector<std::string>& entity_labels);

// Guard formulas in enumeration order: ⊤, atoms, negated atoms, pairwise ∧, pairwise ∨.
std::vector<dsl::Pred> guard_predicates(const GrammarConfig& cfg);

// Node filters in enumeration order: ⊤, isLeaf, isElem, matchText atoms, negations, pairs.
std::vector<dsl::NodeFilter> node_filters(const GrammarConfig& cfg);

// IsSingleton(ν) followed by Sat(ν, φ) for every guard formula.
std::vector<dsl::Guard> gen_guards(const dsl::Locator& locator, const GrammarConfig& cfg);
std::vector<dsl::Guard> gen_guards(const dsl::Locator& locator, const std::vector<dsl::Pred>& formulas);

// One-step locator extensions; empty once the locator reaches guard_depth - 1.
std::vector<dsl::Locator> apply_production_locator(const dsl::Locator& locator, const GrammarConfig& cfg);
std::vector<dsl::Locator> apply_production_locator(const dsl::Locator& locator, const GrammarConfig& cfg,
                                                   const std::vector<dsl::NodeFilter>& filters);

// One-step extractor extensions; empty at the depth cap.
std::vector<dsl::Extractor> apply_production_extractor(const dsl::Extractor& extractor, const GrammarConfig& cfg);

// Every locator reachable from GetRoot, ordered by depth then canonical string.
std::vector<dsl::Locator> enumerate_locators(const GrammarConfig& cfg);
// Every extractor reachable from ExtractContent, ordered by depth then canonical string.
std::vector<dsl::Extractor> enumerate_extractors(const GrammarConfig& cfg);

}  // namespace webqa
