#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "json.hpp"
#include "support.hpp"
#include "webqa/errors.hpp"
#include "webqa/select.hpp"

namespace webqa {
namespace {

using dsl::Extractor;
using dsl::Guard;
using dsl::Locator;
using dsl::Pred;

// One-branch programs Sat(GetRoot, ⊤) -> e for each given extractor.
OptimalSet set_of(const std::vector<Extractor>& extractors) {
  ProgramFamily family{{{0}}, {{BranchChoice{Guard::sat(Locator::root(), Pred::top()), extractors}}}};
  return OptimalSet(testing::kQuestion, testing::kKeywords, Rational{1, 1}, {family});
}

// Extractors that all return the root text unchanged on pages without these delimiters.
std::vector<Extractor> same_behavior(std::size_t n) {
  std::vector<Extractor> out{Extractor::content(), Extractor::filter(Extractor::content(), Pred::top())};
  for (const char* d : {";", "|", "#", "/", "~", "^", "%", "@", "$", "&"}) out.push_back(Extractor::split(Extractor::content(), d));
  out.resize(n, Extractor::content());
  return out;
}

std::vector<PagePtr> unlabeled_pages() {
  return {testing::make_page({"a, b, c"}, {0}), testing::make_page({"x y, z"}, {0}), testing::make_page({"solo"}, {0})};
}

TEST(BuildEnsemble, SingletonAndSeeds) {
  const OptimalSet one = set_of({Extractor::content()});
  const Ensemble e = build_ensemble(one, 20, 3);
  ASSERT_EQ(e.members.size(), 20U);
  for (const auto& m : e.members) EXPECT_EQ(m, e.members.front());
  const OptimalSet many = set_of(same_behavior(6));
  EXPECT_EQ(build_ensemble(many, 50, 9).members, build_ensemble(many, 50, 9).members);
  EXPECT_NE(build_ensemble(many, 50, 9).members, build_ensemble(many, 50, 10).members);
  EXPECT_THROW((void)build_ensemble(OptimalSet{}, 5, 1), ContractViolation);
  EXPECT_THROW((void)build_ensemble(many, 0, 1), ContractViolation);
}

TEST(BuildEnsemble, DrawsAreUniform) {
  const OptimalSet set = set_of(same_behavior(6));
  const Ensemble e = build_ensemble(set, 10000, 2024);
  std::map<std::string, double> freq;
  for (const auto& m : e.members) freq[dsl::canonical_serialize(m)] += 1;
  ASSERT_EQ(freq.size(), 6U);
  const double expected = 10000.0 / 6.0;
  double chi2 = 0;
  for (const auto& [_, observed] : freq) chi2 += (observed - expected) * (observed - expected) / expected;
  // Upper 1% point of chi-square with 5 degrees of freedom.
  EXPECT_LT(chi2, 15.086);
}

TEST(EnsembleOutputs, SharedRowsAndDirectEvaluation) {
  const OptimalSet set = set_of({Extractor::content(), Extractor::split(Extractor::content(), ",")});
  const Ensemble e = build_ensemble(set, 12, 4);
  const auto pages = unlabeled_pages();
  const OutputMatrix m = ensemble_outputs(e, pages, *testing::fixture_provider());
  EXPECT_EQ(m.members(), 12U);
  EXPECT_EQ(m.inputs(), 3U);
  EXPECT_EQ(m.distinct_rows().size(), 2U);
  for (std::size_t j = 0; j < e.members.size(); ++j) {
    for (std::size_t k = 0; k < pages.size(); ++k) {
      EXPECT_EQ(m.row(j)[k], dsl::eval_program(e.members[j], *pages[k], *testing::fixture_provider()));
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (e.members[i] == e.members[j]) EXPECT_EQ(&m.row(i), &m.row(j));
    }
  }
  const auto mult = m.multiplicities();
  EXPECT_EQ(mult[0] + mult[1], 12U);
  const OutputMatrix none = ensemble_outputs(e, {}, *testing::fixture_provider());
  EXPECT_EQ(none.members(), 12U);
  EXPECT_EQ(none.inputs(), 0U);
}

TEST(TransductiveLoss, Examples) {
  const auto pages = unlabeled_pages();
  const auto& provider = *testing::fixture_provider();
  const Ensemble same{{dsl::Program{{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), Extractor::content()}}, "q", {"k"}}}, 0};
  const OutputMatrix m = ensemble_outputs(same, pages, provider);
  EXPECT_EQ(transductive_loss(m.row(0), m), 0U);
  // Single member: loss is the plain Hamming sum against its row.
  const std::vector<StringSet> guess{StringSet{"a"}, StringSet{}, StringSet{"solo", "extra"}};
  // {a} vs {a,b,c}: 2; {} vs {x,y,z}: 3; {solo,extra} vs {solo}: 1.
  EXPECT_EQ(transductive_loss(guess, m), 6U);
  EXPECT_THROW((void)transductive_loss(std::vector<StringSet>{}, m), ContractViolation);
}

// Direct form of the objective: the empirical distribution over distinct output matrices, weighted by
// frequency, scaled by the ensemble size.
std::uint64_t expected_form_loss(std::span<const StringSet> outputs, const std::vector<std::vector<StringSet>>& rows) {
  std::map<std::vector<StringSet>, std::size_t> freq;
  for (const auto& r : rows) ++freq[r];
  double probability_mass = 0;
  double expectation = 0;
  for (const auto& [matrix, count] : freq) {
    const double p = static_cast<double>(count) / static_cast<double>(rows.size());
    probability_mass += p;
    double l = 0;
    for (std::size_t k = 0; k < outputs.size(); ++k) l += static_cast<double>(hamming(outputs[k], matrix[k]));
    expectation += p * l;
  }
  EXPECT_NEAR(probability_mass, 1.0, 1e-12);
  return static_cast<std::uint64_t>(std::llround(expectation * static_cast<double>(rows.size())));
}

TEST(TransductiveLoss, EqualsExpectationOverEmpiricalDistribution) {
  std::mt19937_64 rng(12);
  const std::vector<Extractor> pool{Extractor::content(), Extractor::split(Extractor::content(), ","),
                                    Extractor::split(Extractor::content(), " "),
                                    Extractor::substring(Extractor::content(), Pred::atom(PredicateKind::keyword(0.5)), 1),
                                    Extractor::split(Extractor::content(), ";")};
  const auto pages = unlabeled_pages();
  for (int trial = 0; trial < 30; ++trial) {
    Ensemble e;
    const std::size_t n = 1 + rng() % 7;
    for (std::size_t j = 0; j < n; ++j) {
      e.members.push_back({{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), pool[rng() % pool.size()]}}, "q", {"k"}});
    }
    const OutputMatrix m = ensemble_outputs(e, pages, *testing::fixture_provider());
    std::vector<std::vector<StringSet>> rows;
    for (std::size_t j = 0; j < n; ++j) rows.push_back(m.row(j));
    for (const auto& candidate : m.distinct_rows()) {
      EXPECT_EQ(transductive_loss(candidate, m), expected_form_loss(candidate, rows));
    }
  }
}

TEST(SelectProgram, SingletonSetReturnsItsProgram) {
  const OptimalSet one = set_of({Extractor::split(Extractor::content(), ",")});
  const dsl::Program only = one.program(0);
  EXPECT_EQ(select_program(one, unlabeled_pages(), 10, 1, *testing::fixture_provider()).chosen, only);
  EXPECT_EQ(select_random(one, 5), only);
  EXPECT_EQ(select_shortest(one, 5), only);
  EXPECT_THROW((void)select_random(OptimalSet{}, 1), ContractViolation);
  EXPECT_THROW((void)select_shortest(OptimalSet{}, 1), ContractViolation);
}

TEST(SelectProgram, PlantedMajorityWins) {
  // Nine members that echo the root text and one that returns nothing.
  std::vector<dsl::Program> members;
  for (const auto& e : same_behavior(9)) members.push_back({{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), e}}, "q", {"k"}});
  const dsl::Program outlier{{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), Extractor::filter(Extractor::content(), Pred::negate(Pred::top()))}}, "q", {"k"}};
  members.push_back(outlier);
  const auto pages = unlabeled_pages();
  const auto& provider = *testing::fixture_provider();
  const Selection sel = select_from_ensemble(Ensemble{members, 0}, pages, provider);

  // Oracle: brute force over the ensemble, summing Hamming distances between evaluated outputs.
  std::vector<std::vector<StringSet>> outputs;
  for (const auto& p : members) {
    std::vector<StringSet> row;
    for (const auto& page : pages) row.push_back(dsl::eval_program(p, *page, provider));
    outputs.push_back(row);
  }
  std::vector<std::uint64_t> losses;
  for (const auto& mine : outputs) {
    std::uint64_t l = 0;
    for (const auto& theirs : outputs) {
      for (std::size_t k = 0; k < pages.size(); ++k) l += hamming(mine[k], theirs[k]);
    }
    losses.push_back(l);
  }
  const std::uint64_t min_loss = *std::min_element(losses.begin(), losses.end());
  EXPECT_EQ(sel.loss, min_loss);
  EXPECT_NE(sel.chosen, outlier);
  EXPECT_GT(losses.back(), min_loss);
  // Among the tied majority the smallest program wins: bare ExtractContent.
  EXPECT_EQ(sel.chosen, members.front());
  EXPECT_EQ(sel.candidates.size(), 10U);
  const auto report = nlohmann::json::parse(sel.report_json());
  EXPECT_EQ(report["loss"].get<std::uint64_t>(), min_loss);
  EXPECT_EQ(report["candidates"].size(), 10U);
}

TEST(SelectProgram, InvariantToMemberOrder) {
  std::vector<dsl::Program> members;
  for (const auto& e : same_behavior(5)) members.push_back({{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), e}}, "q", {"k"}});
  members.push_back({{dsl::Branch{Guard::sat(Locator::root(), Pred::top()), Extractor::split(Extractor::content(), ",")}}, "q", {"k"}});
  members.push_back(members.back());
  const auto pages = unlabeled_pages();
  const auto& provider = *testing::fixture_provider();
  const dsl::Program reference = select_from_ensemble(Ensemble{members, 0}, pages, provider).chosen;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(members.begin(), members.end(), rng);
    EXPECT_EQ(select_from_ensemble(Ensemble{members, 0}, pages, provider).chosen, reference);
  }
}

TEST(SelectShortest, PicksMinimumSize) {
  const Extractor small = Extractor::split(Extractor::content(), ",");
  const Extractor big = Extractor::filter(Extractor::split(Extractor::content(), ","), Pred::atom(PredicateKind::answer()));
  const OptimalSet set = set_of({big, small});
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_EQ(select_shortest(set, seed).branches[0].extractor, small);
  EXPECT_EQ(select_random(set, 42), select_random(set, 42));
}

}  // namespace
}  // namespace webqa
