#include <map>

#include "webqa/errors.hpp"
#include "webqa/synth.hpp"

namespace webqa {

namespace {

// Everything that determines a branch's contribution: where its guard holds and what its
// extractor scores on every example.
struct Behavior {
  ExampleMask fires = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> counts;  // (tp, pred) per example
  std::vector<BranchChoice> choices;
};

// Walks every ordered branch sequence in which each branch fires first on at least one new
// example. Branches are grouped per step by what they contribute there, which is exactly what
// the score depends on.
class Enumerator {
 public:
  struct Step {
    ExampleMask fires = 0;
    std::vector<std::size_t> behaviors;
  };

  Enumerator(const std::vector<Behavior>& behaviors, std::int64_t gold, ExampleMask all, std::uint64_t cap)
      : behaviors_(behaviors), gold_(gold), all_(all), cap_(cap) {}

  void run() { visit(0, 0, 0); }

  std::optional<Rational> best;
  std::vector<std::vector<Step>> optimal;

 private:
  struct Option {
    Step step;
    std::int64_t tp = 0;
    std::int64_t pred = 0;
  };

  const std::vector<Option>& options(ExampleMask covered) {
    if (auto it = options_.find(covered); it != options_.end()) return it->second;
    std::map<std::pair<ExampleMask, std::vector<std::pair<std::int64_t, std::int64_t>>>, std::vector<std::size_t>>
        groups;
    for (std::size_t b = 0; b < behaviors_.size(); ++b) {
      const ExampleMask fresh = behaviors_[b].fires & ~covered;
      if (fresh == 0) continue;
      std::vector<std::pair<std::int64_t, std::int64_t>> contribution;
      for (std::size_t j = 0; j < behaviors_[b].counts.size(); ++j) {
        if (fresh & (ExampleMask{1} << j)) contribution.push_back(behaviors_[b].counts[j]);
      }
      groups[{behaviors_[b].fires, std::move(contribution)}].push_back(b);
    }
    std::vector<Option> out;
    for (auto& [key, members] : groups) {
      Option o{{key.first, std::move(members)}, 0, 0};
      for (const auto& [tp, pred] : key.second) {
        o.tp += tp;
        o.pred += pred;
      }
      out.push_back(std::move(o));
    }
    return options_.emplace(covered, std::move(out)).first->second;
  }

  void visit(ExampleMask covered, std::int64_t tp, std::int64_t pred) {
    if (covered == all_) {
      const Rational f1 = exact_f1({tp, pred, gold_});
      if (!best || f1 > *best) {
        best = f1;
        optimal.clear();
      }
      if (f1 == *best) optimal.push_back(sequence_);
      return;
    }
    for (const Option& o : options(covered)) {
      if (++visited_ > cap_) {
        throw CapExceeded("brute-force program space exceeds " + std::to_string(cap_) + " branch sequences");
      }
      sequence_.push_back(o.step);
      visit(covered | o.step.fires, tp + o.tp, pred + o.pred);
      sequence_.pop_back();
    }
  }

  const std::vector<Behavior>& behaviors_;
  std::int64_t gold_;
  ExampleMask all_;
  std::uint64_t cap_;
  std::uint64_t visited_ = 0;
  std::vector<Step> sequence_;
  std::map<ExampleMask, std::vector<Option>> options_;
};

}  // namespace

OptimalSet brute_force_synthesize(const ExampleSet& examples, const PredicateProvider& provider,
                                  const SynthConfig& config) {
  const std::size_t n = examples.size();
  if (n == 0) throw ContractViolation("brute force needs at least one labeled example");
  if (n > 8 * sizeof(ExampleMask)) throw CapExceeded("too many examples for brute force");
  const QueryContext query = examples.query();
  const auto formulas = guard_predicates(config.grammar);
  const auto extractors = enumerate_extractors(config.grammar);
  const auto locators = enumerate_locators(config.grammar);

  std::int64_t gold = 0;
  for (const auto& ex : examples.examples) gold += static_cast<std::int64_t>(ex.gold_tokens.size());

  using CountVector = std::vector<std::pair<std::int64_t, std::int64_t>>;
  std::map<std::pair<ExampleMask, CountVector>, std::vector<BranchChoice>> grouped;

  for (const auto& locator : locators) {
    std::vector<NodeSet> nodes;
    for (const auto& ex : examples.examples) {
      nodes.push_back(dsl::eval_locator(locator, dsl::EvalEnv{*ex.page, query, provider}));
    }

    std::map<ExampleMask, std::vector<dsl::Guard>> guards_by_mask;
    for (const auto& guard : gen_guards(locator, formulas)) {
      ExampleMask mask = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& ex = examples.examples[j];
        if (dsl::guard_holds(guard, nodes[j], dsl::EvalEnv{*ex.page, query, provider})) mask |= ExampleMask{1} << j;
      }
      if (mask != 0) guards_by_mask[mask].push_back(guard);
    }
    if (guards_by_mask.empty()) continue;

    std::map<CountVector, std::vector<dsl::Extractor>> extractors_by_counts;
    for (const auto& extractor : extractors) {
      CountVector cv;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& ex = examples.examples[j];
        const StringSet out = dsl::eval_extractor(extractor, nodes[j], dsl::EvalEnv{*ex.page, query, provider});
        const CountTriple c = counts(tokenize_all(out), ex.gold_tokens);
        cv.emplace_back(c.tp, c.pred);
      }
      extractors_by_counts[cv].push_back(extractor);
    }

    for (const auto& [mask, guards] : guards_by_mask) {
      for (const auto& [cv, exts] : extractors_by_counts) {
        auto& choices = grouped[{mask, cv}];
        for (const auto& g : guards) choices.push_back({g, exts});
      }
    }
  }

  std::vector<Behavior> behaviors;
  for (auto& [key, choices] : grouped) behaviors.push_back({key.first, key.second, std::move(choices)});

  const ExampleMask all = n == 32 ? ~ExampleMask{0} : (ExampleMask{1} << n) - 1;
  Enumerator enumerator(behaviors, gold, all, config.brute_force_cap);
  enumerator.run();
  if (!enumerator.best) return {examples.question, examples.keywords, {0, 1}, {}, {}};

  std::vector<ProgramFamily> families;
  for (const auto& sequence : enumerator.optimal) {
    ProgramFamily family;
    ExampleMask covered = 0;
    for (const auto& step : sequence) {
      std::vector<std::size_t> block;
      for (std::size_t j = 0; j < n; ++j) {
        const ExampleMask bit = ExampleMask{1} << j;
        if ((step.fires & bit) && !(covered & bit)) block.push_back(j);
      }
      covered |= step.fires;
      family.partition.push_back(std::move(block));
      std::vector<BranchChoice> choices;
      for (std::size_t b : step.behaviors) {
        choices.insert(choices.end(), behaviors[b].choices.begin(), behaviors[b].choices.end());
      }
      family.blocks.push_back(std::move(choices));
    }
    families.push_back(std::move(family));
  }
  return {examples.question, examples.keywords, *enumerator.best, std::move(families), {}};
}

}  // namespace webqa
