#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "instances.hpp"
#include "support.hpp"
#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"
#include "webqa/synth.hpp"

namespace webqa {
namespace {

using dsl::Extractor;
using dsl::Guard;
using dsl::Locator;
using dsl::NodeFilter;
using dsl::Pred;

// ---- ordered partitions ----

// Oracle: every labeling of n items with block ids 0..k-1 that uses every id once is one ordered partition.
std::set<Partition> partitions_by_labeling(std::size_t n) {
  std::set<Partition> out;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> label(n, 0);
    while (true) {
      Partition p(k);
      for (std::size_t i = 0; i < n; ++i) p[label[i]].push_back(i);
      if (std::none_of(p.begin(), p.end(), [](const auto& b) { return b.empty(); })) out.insert(p);
      std::size_t i = 0;
      while (i < n && ++label[i] == k) label[i++] = 0;
      if (i == n) break;
    }
  }
  return out;
}

TEST(OrderedPartitions, SmallCounts) {
  EXPECT_EQ(ordered_partitions(1), (std::vector<Partition>{{{0}}}));
  EXPECT_EQ(ordered_partitions(2), (std::vector<Partition>{{{0, 1}}, {{0}, {1}}, {{1}, {0}}}));
  EXPECT_EQ(ordered_partitions(3).size(), 13U);
  EXPECT_EQ(ordered_partitions(4).size(), 75U);
}

TEST(OrderedPartitions, MatchLabelingOracleAndOrder) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto parts = ordered_partitions(n);
    EXPECT_EQ(std::set<Partition>(parts.begin(), parts.end()), partitions_by_labeling(n));
    EXPECT_EQ(std::set<Partition>(parts.begin(), parts.end()).size(), parts.size());
    EXPECT_TRUE(std::is_sorted(parts.begin(), parts.end(), [](const Partition& a, const Partition& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    }));
  }
}

TEST(OrderedPartitions, Refusals) {
  EXPECT_THROW((void)ordered_partitions(0), ContractViolation);
  EXPECT_THROW((void)ordered_partitions(8), CapExceeded);
  EXPECT_EQ(ordered_partitions(3, 3).size(), 13U);
  EXPECT_THROW((void)ordered_partitions(4, 3), CapExceeded);
}

// ---- exact scores ----

TEST(ExactF1, Examples) {
  EXPECT_EQ(exact_f1({1, 2, 2}), (Rational{1, 2}));
  EXPECT_EQ(exact_f1({0, 0, 0}), (Rational{1, 1}));
  EXPECT_EQ(exact_f1({0, 3, 0}), (Rational{0, 1}));
  EXPECT_EQ(exact_f1({1, 4, 2}), (Rational{1, 3}));
  EXPECT_LT((Rational{1, 3}), (Rational{1, 2}));
  EXPECT_EQ((Rational{2, 4}), (Rational{1, 2}));
}

TEST(Objective, F1AndLinear) {
  const Objective f1 = Objective::f1();
  EXPECT_EQ(f1.score(1, 2, 2), (Rational{1, 2}));
  EXPECT_EQ(f1.bound(1, 2), (Rational{2, 3}));
  const Objective lin = Objective::linear({1, 2});
  // 2·1 − (1/2)(2 + 2) = 0; bound at tp = 1, gold = 2 is 2 − (1/2)(3) = 1/2.
  EXPECT_EQ(lin.score(1, 2, 2), (Rational{0, 1}));
  EXPECT_EQ(lin.bound(1, 2), (Rational{1, 2}));
  EXPECT_NE(f1.key(), lin.key());
}

// ---- end to end ----

TEST(Synthesize, MotivatingFixtureContainsReferenceProgram) {
  const ExampleSet examples = testing::motivating_examples();
  CachingProvider provider(testing::fixture_provider());
  SynthConfig cfg;
  cfg.grammar = testing::motivating_grammar();
  const OptimalSet optimal = synthesize(examples, provider, cfg);
  const dsl::Program reference = dsl::parse_program(testing::read_file(testing::fixture_path("motivating/program.json")));
  EXPECT_EQ(optimal.f1(), (Rational{1, 1}));
  EXPECT_TRUE(optimal.contains(reference));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 40; ++i) {
    const dsl::Program p = optimal.sample(rng);
    EXPECT_DOUBLE_EQ(f1_program(p, examples, provider).scores.f1, 1.0) << dsl::canonical_serialize(p);
  }
}

ExampleSet single_example(PagePtr page, StringSet gold) {
  ExampleSet e;
  e.question = testing::kQuestion;
  e.keywords = testing::kKeywords;
  e.examples.push_back(make_example("only", std::move(page), std::move(gold)));
  return e;
}

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.grammar.atoms = {PredicateKind::keyword(0.5), PredicateKind::entity("ORG")};
  cfg.grammar.k_grid = {1};
  cfg.grammar.delimiters = {","};
  cfg.grammar.guard_depth = 3;
  cfg.grammar.extractor_depth = 3;
  cfg.grammar.guard_pairs = false;
  return cfg;
}

TEST(Synthesize, RootTextGoldGivesContentOfRoot) {
  const auto examples = single_example(testing::make_page({"Jane Doe", "Research"}, {0, 0}), StringSet{"Jane Doe"});
  const OptimalSet optimal = synthesize(examples, *testing::fixture_provider(), small_config());
  EXPECT_EQ(optimal.f1(), (Rational{1, 1}));
  const dsl::Program expected{{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), Extractor::content()}},
                              examples.question,
                              examples.keywords};
  EXPECT_TRUE(optimal.contains(expected));
}

TEST(Synthesize, RefusesBadInputs) {
  const auto examples = single_example(testing::make_page({"x"}, {0}), StringSet{"x"});
  SynthConfig pooled = small_config();
  pooled.pooled_recall = true;
  EXPECT_THROW((void)synthesize(examples, *testing::fixture_provider(), pooled), ContractViolation);
  EXPECT_THROW((void)synthesize(ExampleSet{}, *testing::fixture_provider(), small_config()), ContractViolation);
  ExampleSet many;
  for (int i = 0; i < 8; ++i) many.examples.push_back(examples.examples[0]);
  EXPECT_THROW((void)synthesize(many, *testing::fixture_provider(), small_config()), CapExceeded);
}

TEST(BruteForce, AllZeroSpaceIsReturnedWhole) {
  const auto examples = single_example(testing::make_page({"x"}, {0}), StringSet{"unrelated"});
  SynthConfig cfg;
  cfg.grammar.guard_depth = 2;
  cfg.grammar.extractor_depth = 1;
  const OptimalSet brute = brute_force_synthesize(examples, *testing::fixture_provider(), cfg);
  EXPECT_EQ(brute.f1(), (Rational{0, 1}));
  // IsSingleton(GetRoot) and Sat(GetRoot, ⊤), each followed by ExtractContent.
  EXPECT_EQ(brute.count(), 2U);
  const OptimalSet fast = synthesize(examples, *testing::fixture_provider(), cfg);
  EXPECT_TRUE(testing::same_programs(fast, brute));
}

TEST(BruteForce, HonorsCap) {
  const ExampleSet examples = testing::motivating_examples();
  SynthConfig cfg = small_config();
  cfg.brute_force_cap = 10;
  EXPECT_THROW((void)brute_force_synthesize(examples, *testing::fixture_provider(), cfg), CapExceeded);
}

// ---- branch level ----

TEST(SynthesizeBranch, NoNegativesAdmitsTrivialGuard) {
  const ExampleSet examples = testing::motivating_examples();
  Synthesizer s(examples, *testing::fixture_provider(), small_config());
  Synthesizer::GuardStream stream(s, 0b11, 0, Objective::f1());
  std::vector<Guard> first;
  while (auto g = stream.next(std::nullopt)) {
    first.push_back(*g);
    if (first.size() == 2) break;
  }
  EXPECT_EQ(first, (std::vector<Guard>{Guard::is_singleton(Locator::root()), Guard::sat(Locator::root(), Pred::top())}));
  EXPECT_FALSE(s.synthesize_branch(0b11, 0, Objective::f1()).empty());
}

TEST(SynthesizeBranch, InseparableExamplesGiveEmptyResult) {
  const auto page = testing::make_page({"Same", "text"}, {0, 0});
  ExampleSet examples = single_example(page, StringSet{"text"});
  examples.examples.push_back(make_example("twin", page, StringSet{"Same"}));
  Synthesizer s(examples, *testing::fixture_provider(), small_config());
  EXPECT_TRUE(s.synthesize_branch(0b01, 0b10, Objective::f1()).empty());
  EXPECT_TRUE(s.synthesize_branch(0b10, 0b01, Objective::f1()).empty());
  EXPECT_FALSE(s.synthesize_branch(0b11, 0, Objective::f1()).empty());
}

TEST(SynthesizeBranch, KeywordGuardSeparatesTwoSchemas) {
  // Same shape, different section headings: only a keyword atom can tell them apart.
  const auto service = testing::make_page({"Ann", "Service", "PLDI'19 (PC)"}, {0, 0, 1});
  const auto teaching = testing::make_page({"Bob", "Teaching", "PLDI'20 (TA)"}, {0, 0, 1});
  ExampleSet examples = single_example(service, StringSet{"PLDI'19"});
  examples.examples.push_back(make_example("teaching", teaching, StringSet{"PLDI'20"}));
  SynthConfig cfg = small_config();
  Synthesizer s(examples, *testing::fixture_provider(), cfg);
  const BranchResult r = s.synthesize_branch(0b01, 0b10, Objective::f1());
  ASSERT_FALSE(r.empty());
  for (const auto& choice : r.choices) {
    EXPECT_NE(choice.guard.canonical().find("matchKeyword"), std::string::npos) << choice.guard.canonical();
    // Oracle: evaluate the guard directly on both pages.
    const auto q = examples.query();
    EXPECT_TRUE(dsl::eval_guard(choice.guard, dsl::EvalEnv{*service, q, *testing::fixture_provider()}).holds);
    EXPECT_FALSE(dsl::eval_guard(choice.guard, dsl::EvalEnv{*teaching, q, *testing::fixture_provider()}).holds);
  }
  EXPECT_EQ(r.best, (Rational{1, 1}));
}

TEST(PropagateExamples, LocatedNodeSets) {
  const ExampleSet examples = testing::motivating_examples();
  Synthesizer s(examples, *testing::fixture_provider(), small_config());
  const auto at_root = s.propagate_examples(Locator::root(), 0b11);
  ASSERT_EQ(at_root.size(), 2U);
  EXPECT_EQ(at_root[0].nodes, (NodeSet{0}));
  EXPECT_EQ(at_root[1].nodes, (NodeSet{0}));
  const auto service = dsl::get_leaves(
      Locator::descendants(Locator::root(), NodeFilter::match_text(Pred::atom(PredicateKind::keyword(0.5)), false)));
  const auto located = s.propagate_examples(service, 0b01);
  ASSERT_EQ(located.size(), 1U);
  EXPECT_EQ(located[0].nodes, (NodeSet{14, 15}));
  EXPECT_EQ(located[0].gold_tokens, examples.examples[0].gold_tokens);
  const auto nothing = s.propagate_examples(Locator::children(Locator::root(), NodeFilter::negate(NodeFilter::top())), 0b11);
  EXPECT_TRUE(nothing[0].nodes.empty());
  EXPECT_TRUE(nothing[1].nodes.empty());
}

TEST(GuardStream, MatchesFilteredEnumerationAndPrunesToSubset) {
  const ExampleSet examples = testing::motivating_examples();
  SynthConfig cfg = small_config();
  Synthesizer s(examples, *testing::fixture_provider(), cfg);
  // Oracle: every guard over every locator, kept when true on page A and false on page B.
  std::set<std::string> expected;
  const auto q = examples.query();
  for (const auto& loc : enumerate_locators(cfg.grammar)) {
    for (const auto& g : gen_guards(loc, cfg.grammar)) {
      const bool on_a = dsl::eval_guard(g, dsl::EvalEnv{*examples.examples[0].page, q, *testing::fixture_provider()}).holds;
      const bool on_b = dsl::eval_guard(g, dsl::EvalEnv{*examples.examples[1].page, q, *testing::fixture_provider()}).holds;
      if (on_a && !on_b) expected.insert(g.canonical());
    }
  }
  auto drain = [&](const std::optional<Rational>& opt) {
    Synthesizer::GuardStream stream(s, 0b01, 0b10, Objective::f1());
    std::set<std::string> got;
    while (auto g = stream.next(opt)) EXPECT_TRUE(got.insert(g->canonical()).second) << "duplicate " << g->canonical();
    return got;
  };
  const auto unpruned = drain(std::nullopt);
  EXPECT_EQ(unpruned, expected);
  EXPECT_FALSE(expected.empty());
  const auto pruned = drain(Rational{1, 1});
  EXPECT_TRUE(std::includes(unpruned.begin(), unpruned.end(), pruned.begin(), pruned.end()));
  EXPECT_GT(s.stats().pruned_locators, 0U);
}

TEST(SynthesizeExtractors, CommaFixtureFindsSplitFilter) {
  const auto page = testing::make_page({"PLDI'19 (PC), CAV'20 (ERC), POPL'21 (PC)"}, {0});
  const auto examples = single_example(page, StringSet{"PLDI'19 (PC)", "POPL'21 (PC)"});
  Synthesizer s(examples, *testing::fixture_provider(), small_config());
  const ExtractorResult r = s.synthesize_extractors(Locator::root(), 0b1, Objective::f1());
  EXPECT_EQ(r.best, (Rational{1, 1}));
  const Extractor pipeline = Extractor::filter(Extractor::split(Extractor::content(), ","), Pred::atom(PredicateKind::keyword(0.5)));
  EXPECT_TRUE(std::any_of(r.optimal.begin(), r.optimal.end(), [&](const ScoredExtractor& e) { return e.extractor == pipeline; }));
  // pldi 19 pc popl 21
  for (const auto& e : r.optimal) EXPECT_EQ(e.tp, 5);
}

TEST(SynthesizeExtractors, FullContentGoldKeepsExtractContent) {
  const auto page = testing::make_page({"alpha beta"}, {0});
  const auto examples = single_example(page, StringSet{"alpha beta"});
  Synthesizer s(examples, *testing::fixture_provider(), small_config());
  const ExtractorResult r = s.synthesize_extractors(Locator::root(), 0b1, Objective::f1());
  EXPECT_EQ(r.best, (Rational{1, 1}));
  EXPECT_TRUE(std::any_of(r.optimal.begin(), r.optimal.end(),
                          [](const ScoredExtractor& e) { return e.extractor == Extractor::content(); }));
}

// ---- optimal set ----

TEST(OptimalSetApi, EnumerationDecodingAndJson) {
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 8) {
    auto inst = testing::random_instance(rng);
    const OptimalSet set = synthesize(inst.examples, testing::tiny_provider(), inst.config);
    if (set.count() > 3000) continue;
    ++checked;
    const auto all = set.programs(set.count());
    ASSERT_EQ(all.size(), set.count());
    std::set<std::string> distinct;
    for (std::uint64_t i = 0; i < set.count(); ++i) {
      const auto& p = all[i];
      EXPECT_EQ(set.program(i), p);
      EXPECT_TRUE(set.contains(p));
      distinct.insert(dsl::canonical_serialize(p));
      EXPECT_EQ(exact_f1(f1_program(p, inst.examples, testing::tiny_provider()).total), set.f1());
    }
    EXPECT_EQ(distinct.size(), all.size());
    EXPECT_EQ(distinct, set.canonical_set(set.count()));
    if (set.count() > 1) EXPECT_THROW((void)set.programs(set.count() - 1), CapExceeded);

    const OptimalSet back = OptimalSet::from_json(set.to_json());
    EXPECT_TRUE(testing::same_programs(back, set));
    EXPECT_EQ(back.to_json(), set.to_json());

    const OptimalSet shortest = set.shortest();
    std::size_t min_size = SIZE_MAX;
    for (const auto& p : all) min_size = std::min(min_size, p.size());
    for (const auto& p : shortest.programs(shortest.count())) {
      EXPECT_EQ(p.size(), min_size);
      EXPECT_TRUE(set.contains(p));
    }
    EXPECT_EQ(shortest.count(),
              static_cast<std::uint64_t>(std::count_if(all.begin(), all.end(), [&](const auto& p) { return p.size() == min_size; })));
  }
}

// ---- oracle and mode equivalence ----

TEST(SynthProperties, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 15; ++i) {
    auto inst = testing::random_instance(rng);
    const OptimalSet fast = synthesize(inst.examples, testing::tiny_provider(), inst.config);
    const OptimalSet slow = brute_force_synthesize(inst.examples, testing::tiny_provider(), inst.config);
    std::string why;
    EXPECT_TRUE(testing::same_programs(fast, slow, &why)) << "instance " << i << ": " << why;
  }
}

TEST(SynthProperties, PruningAndDecompositionDoNotChangeResult) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 15; ++i) {
    auto inst = testing::random_instance(rng);
    const OptimalSet base = synthesize(inst.examples, testing::tiny_provider(), inst.config);
    SynthConfig no_prune = inst.config;
    no_prune.no_prune = true;
    const OptimalSet unpruned = synthesize(inst.examples, testing::tiny_provider(), no_prune);
    SynthConfig no_decomp = inst.config;
    no_decomp.no_decomp = true;
    const OptimalSet joint = synthesize(inst.examples, testing::tiny_provider(), no_decomp);
    std::string why;
    EXPECT_TRUE(testing::same_programs(base, unpruned, &why)) << "no_prune " << i << ": " << why;
    EXPECT_TRUE(testing::same_programs(base, joint, &why)) << "no_decomp " << i << ": " << why;
    EXPECT_LE(base.stats().expansions(), unpruned.stats().expansions()) << i;
  }
}

TEST(SynthProperties, DeterministicResultAndStatistics) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    auto inst = testing::random_instance(rng);
    const OptimalSet a = synthesize(inst.examples, testing::tiny_provider(), inst.config);
    const OptimalSet b = synthesize(inst.examples, testing::tiny_provider(), inst.config);
    EXPECT_EQ(a.to_json(), b.to_json());
    const SynthStats& sa = a.stats();
    const SynthStats& sb = b.stats();
    EXPECT_EQ(sa.locator_expansions, sb.locator_expansions);
    EXPECT_EQ(sa.extractor_expansions, sb.extractor_expansions);
    EXPECT_EQ(sa.pruned_locators, sb.pruned_locators);
    EXPECT_EQ(sa.pruned_extractors, sb.pruned_extractors);
    EXPECT_EQ(sa.skipped_guards, sb.skipped_guards);
    EXPECT_EQ(sa.passes, sb.passes);
  }
}

}  // namespace
}  // namespace webqa
