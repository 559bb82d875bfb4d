#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "webqa/dsl.hpp"
#include "webqa/grammar.hpp"
#include "webqa/metrics.hpp"

namespace webqa {

__extension__ using Int128 = __int128;

// Exact fraction with a positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const Int128 lhs = static_cast<Int128>(a.num) * b.den;
    const Int128 rhs = static_cast<Int128>(b.num) * a.den;
    return lhs <=> rhs;
  }
  friend bool operator==(const Rational& a, const Rational& b) { return (a <=> b) == 0; }
};

// Exact micro F1 of summed counts, with the both-empty convention.
Rational exact_f1(const CountTriple& total);

struct SynthConfig {
  GrammarConfig grammar;
  bool no_prune = false;
  bool no_decomp = false;
  bool pooled_recall = false;  // rejected by synthesize; kept for metrics parity
  std::size_t max_examples = 7;
  // Brute force refuses when the number of branch sequences it would score exceeds this.
  std::uint64_t brute_force_cap = 20'000'000;
};

using Partition = std::vector<std::vector<std::size_t>>;

// Every ordered set partition of {0..n-1}, by block count then lexicographically.
// Throws CapExceeded when n > cap and ContractViolation when n == 0.
std::vector<Partition> ordered_partitions(std::size_t n, std::size_t cap = 7);

struct SynthStats {
  std::uint64_t locator_expansions = 0;
  std::uint64_t extractor_expansions = 0;
  std::uint64_t pruned_locators = 0;
  std::uint64_t pruned_extractors = 0;
  std::uint64_t skipped_guards = 0;
  std::uint64_t extractor_memo_hits = 0;
  std::uint64_t branch_memo_hits = 0;
  std::uint64_t passes = 0;
  std::uint64_t partitions = 0;

  [[nodiscard]] std::uint64_t expansions() const { return locator_expansions + extractor_expansions; }
};

// One guard together with every extractor that may follow it.
struct BranchChoice {
  dsl::Guard guard;
  std::vector<dsl::Extractor> extractors;
};

// Programs whose i-th branch is any (guard, extractor) drawn from blocks[i].
struct ProgramFamily {
  Partition partition;
  std::vector<std::vector<BranchChoice>> blocks;
};

// All optimal programs, kept as a union of disjoint product families.
class OptimalSet {
 public:
  OptimalSet() = default;
  OptimalSet(std::string question, std::vector<std::string> keywords, Rational f1, std::vector<ProgramFamily> families,
             SynthStats stats = {});

  [[nodiscard]] const std::string& question() const noexcept { return question_; }
  [[nodiscard]] const std::vector<std::string>& keywords() const noexcept { return keywords_; }
  [[nodiscard]] Rational f1() const noexcept { return f1_; }
  [[nodiscard]] const std::vector<ProgramFamily>& families() const noexcept { return families_; }
  [[nodiscard]] const SynthStats& stats() const noexcept { return stats_; }
  void set_stats(const SynthStats& stats) { stats_ = stats; }

  // Throws CapExceeded if the count does not fit in 64 bits.
  [[nodiscard]] std::uint64_t count() const;
  [[nodiscard]] bool empty() const { return families_.empty(); }
  [[nodiscard]] dsl::Program program(std::uint64_t index) const;
  [[nodiscard]] dsl::Program sample(std::mt19937_64& rng) const;
  [[nodiscard]] bool contains(const dsl::Program& program) const;
  // Throws CapExceeded when more than `cap` programs would be produced.
  [[nodiscard]] std::vector<dsl::Program> programs(std::uint64_t cap) const;
  [[nodiscard]] std::set<std::string> canonical_set(std::uint64_t cap) const;
  // The subset of minimum AST size.
  [[nodiscard]] OptimalSet shortest() const;

  // Program files list expanded canonical programs only when there are at most `expand_cap`.
  [[nodiscard]] std::string to_json(std::uint64_t expand_cap = 10'000) const;
  static OptimalSet from_json(std::string_view text);

 private:
  std::string question_;
  std::vector<std::string> keywords_;
  Rational f1_;
  std::vector<ProgramFamily> families_;
  SynthStats stats_;
};

// Score used while searching one block. `f1` is the block's own F1 (the plain objective);
// `linear(λ)` is 2·tp − λ·(pred + gold), whose block-wise maxima compose into the global optimum.
class Objective {
 public:
  static Objective f1();
  static Objective linear(Rational lambda);

  [[nodiscard]] Rational score(std::int64_t tp, std::int64_t pred, std::int64_t gold) const;
  // Best score any extension can reach when recall-covered tokens are at most `tp`.
  [[nodiscard]] Rational bound(std::int64_t tp, std::int64_t gold) const;
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  bool is_f1_ = true;
  Rational lambda_;
  std::string key_;
};

struct ScoredExtractor {
  dsl::Extractor extractor;
  std::int64_t tp = 0;
  std::int64_t pred = 0;
};

struct ExtractorResult {
  std::optional<Rational> best;
  std::vector<ScoredExtractor> optimal;
};

struct BranchResult {
  std::optional<Rational> best;
  std::vector<BranchChoice> choices;
  // Counts of the first choice's first extractor over the positive examples.
  std::int64_t tp = 0;
  std::int64_t pred = 0;

  [[nodiscard]] bool empty() const { return choices.empty(); }
};

using ExampleMask = std::uint32_t;

// Search state over one example set: locator cache, memo tables and statistics.
class Synthesizer {
 public:
  Synthesizer(const ExampleSet& examples, const PredicateProvider& provider, SynthConfig config);

  // Node sets per example plus own-text and subtree gold coverage.
  struct Located {
    std::vector<NodeSet> nodes;
    std::vector<std::int64_t> own_tp;
    std::vector<std::int64_t> subtree_tp;
  };
  const Located& locate(const dsl::Locator& locator);

  [[nodiscard]] bool classifies(const dsl::Guard& guard, ExampleMask positive, ExampleMask negative);

  // Lazy guard enumeration for one branch.
  class GuardStream {
   public:
    GuardStream(Synthesizer& owner, ExampleMask positive, ExampleMask negative, Objective objective);
    // Next guard true on every positive and false on every negative example; `opt` prunes locators.
    std::optional<dsl::Guard> next(const std::optional<Rational>& opt);

   private:
    void extend(const dsl::Locator& locator, const std::optional<Rational>& opt);
    bool prunable(const dsl::Locator& locator, const std::optional<Rational>& opt);

    Synthesizer& owner_;
    ExampleMask positive_;
    ExampleMask negative_;
    Objective objective_;
    std::int64_t gold_ = 0;
    struct Order {
      bool operator()(const dsl::Locator& a, const dsl::Locator& b) const;
    };
    std::set<dsl::Locator, Order> worklist_;
    std::optional<dsl::Locator> current_;
    std::vector<dsl::Guard> pending_;
    std::size_t pending_pos_ = 0;
  };

  std::vector<LocatedExample> propagate_examples(const dsl::Locator& locator, ExampleMask positive);
  ExtractorResult synthesize_extractors(const dsl::Locator& locator, ExampleMask positive, const Objective& objective);
  BranchResult synthesize_branch(ExampleMask positive, ExampleMask negative, const Objective& objective);

  OptimalSet run();

  [[nodiscard]] const SynthStats& stats() const noexcept { return stats_; }
  [[nodiscard]] std::int64_t gold_tokens(ExampleMask mask) const;
  [[nodiscard]] std::size_t example_count() const noexcept { return examples_.size(); }

 private:
  ExtractorResult search_extractors(const dsl::Locator& locator, ExampleMask positive, const Objective& objective);
  BranchResult joint_branch(ExampleMask positive, ExampleMask negative, const Objective& objective);
  void consider(BranchResult& result, const dsl::Guard& guard, const ExtractorResult& extractors);

  const ExampleSet& examples_;
  const PredicateProvider& provider_;
  SynthConfig config_;
  QueryContext query_;
  std::vector<dsl::Pred> guard_formulas_;
  std::vector<dsl::NodeFilter> node_filters_;
  std::unordered_map<std::string, Located> located_;
  std::map<std::tuple<std::string, std::string, ExampleMask>, ExtractorResult> extractor_memo_;
  std::map<std::tuple<std::string, ExampleMask, ExampleMask>, BranchResult> branch_memo_;
  SynthStats stats_;
};

// Throws ContractViolation for empty inputs or pooled_recall, CapExceeded for too many examples.
OptimalSet synthesize(const ExampleSet& examples, const PredicateProvider& provider, const SynthConfig& config);

// Exhaustive reference: scores every distinct branch sequence. Throws CapExceeded past brute_force_cap.
OptimalSet brute_force_synthesize(const ExampleSet& examples, const PredicateProvider& provider,
                                  const SynthConfig& config);

}  // namespace webqa
