#include "instances.hpp"

#include <map>
#include <set>

#include "support.hpp"
#include "webqa/text.hpp"

namespace webqa::testing {
namespace {

const std::vector<std::string> kWords{"PLDI'19", "service", "PC", "Alice Smith", "ACM", "news", "2020", "Paris",
                                      "chair",   "report",  "POPL", "March 2012", "team", "CAV'20"};

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::string random_text(std::mt19937_64& rng) {
  const std::size_t words = 1 + pick(rng, 3);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i > 0) out += coin(rng) ? ", " : " ";
    out += kWords[pick(rng, kWords.size())];
  }
  return out;
}

PagePtr random_page(std::mt19937_64& rng) {
  const std::size_t n = 3 + pick(rng, 4);
  std::vector<std::string> texts;
  std::vector<int> parents{-1};
  std::vector<NodeType> types;
  for (std::size_t i = 0; i < n; ++i) {
    texts.push_back(coin(rng, 0.1) ? std::string() : random_text(rng));
    if (i > 0) parents.push_back(static_cast<int>(pick(rng, i)));
    const std::size_t t = pick(rng, 5);
    types.push_back(t == 0 ? NodeType::List : t == 1 ? NodeType::Table : NodeType::None);
  }
  return make_page(texts, parents, types);
}

StringSet random_gold(std::mt19937_64& rng, const Webpage& page) {
  std::vector<std::string> gold;
  const std::size_t count = pick(rng, 3);
  const auto nodes = page.nodes_in_order();
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& text = nodes[pick(rng, nodes.size())].text;
    if (text.empty()) continue;
    if (coin(rng)) {
      gold.push_back(text);
    } else {
      const auto tokens = scan_tokens(text);
      const auto& t = tokens[pick(rng, tokens.size())];
      gold.push_back(text.substr(t.start, t.end - t.start));
    }
  }
  return StringSet(std::move(gold));
}

}  // namespace

const PredicateProvider& tiny_provider() {
  static const CachingProvider provider(
      std::make_shared<const BaselineProvider>(Gazetteer::parse("ORG\tACM\nLOC\tParis\n")));
  return provider;
}

TinyInstance random_instance(std::mt19937_64& rng) {
  TinyInstance inst;
  const std::size_t labeled = 1 + pick(rng, 3);
  const std::size_t pages = labeled + pick(rng, 4 - labeled + 1);

  inst.examples.question = "Which " + kWords[pick(rng, kWords.size())] + " service did they chair?";
  inst.examples.keywords = {kWords[pick(rng, kWords.size())]};
  if (coin(rng)) inst.examples.keywords.push_back(kWords[pick(rng, kWords.size())]);
  for (std::size_t i = 0; i < pages; ++i) {
    PagePtr page = random_page(rng);
    if (i < labeled) {
      StringSet gold = random_gold(rng, *page);
      inst.examples.examples.push_back(make_example("p" + std::to_string(i), std::move(page), std::move(gold)));
    } else {
      inst.unlabeled.push_back(std::move(page));
    }
  }

  std::vector<PredicateKind> pool{PredicateKind::keyword(0.5), PredicateKind::keyword(1.0), PredicateKind::answer(),
                                  PredicateKind::entity("ORG"), PredicateKind::entity("DATE"),
                                  PredicateKind::entity("PERSON")};
  std::shuffle(pool.begin(), pool.end(), rng);
  GrammarConfig& g = inst.config.grammar;
  g.atoms.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(1 + pick(rng, 4)));
  std::sort(g.atoms.begin(), g.atoms.end());
  if (coin(rng, 0.3)) g.filter_atoms = std::vector<PredicateKind>{g.atoms.front()};
  g.k_grid = coin(rng) ? std::vector<int>{1} : std::vector<int>{1, 2};
  g.delimiters = coin(rng) ? std::vector<std::string>{","} : std::vector<std::string>{",", " "};
  g.guard_depth = 2 + pick(rng, 2);
  g.extractor_depth = 2 + pick(rng, 2);
  g.guard_negation = coin(rng);
  g.guard_pairs = coin(rng);
  g.filter_negation = coin(rng, 0.3);
  g.filter_pairs = false;
  return inst;
}

bool same_programs(const OptimalSet& a, const OptimalSet& b, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.empty() != b.empty()) return fail("one set is empty");
  if (a.empty()) return true;
  if (!(a.f1() == b.f1())) return fail("optimal F1 differs");
  if (a.count() != b.count()) {
    return fail("program counts differ: " + std::to_string(a.count()) + " vs " + std::to_string(b.count()));
  }
  constexpr std::uint64_t kExpand = 50'000;
  if (a.count() <= kExpand) {
    if (a.canonical_set(kExpand) != b.canonical_set(kExpand)) return fail("canonical program sets differ");
    if (a.canonical_set(kExpand).size() != a.count()) return fail("duplicate programs in the set");
    return true;
  }

  // Large sets: each program's partition is determined by where its branches fire first, so
  // equal sets have equal per-partition unions. Check each side's families against the other
  // side's single family for that partition.
  using Positions = std::vector<std::set<std::string>>;
  auto positions = [](const ProgramFamily& f) {
    Positions out;
    for (const auto& block : f.blocks) {
      std::set<std::string> s;
      for (const auto& c : block)
        for (const auto& e : c.extractors) s.insert(c.guard.canonical() + "\x1f" + e.canonical());
      out.push_back(std::move(s));
    }
    return out;
  };
  std::map<Partition, std::vector<Positions>> pa;
  std::map<Partition, std::vector<Positions>> pb;
  for (const auto& f : a.families()) pa[f.partition].push_back(positions(f));
  for (const auto& f : b.families()) pb[f.partition].push_back(positions(f));
  if (pa.size() != pb.size()) return fail("partitions differ");
  for (const auto& [partition, fa] : pa) {
    auto it = pb.find(partition);
    if (it == pb.end()) return fail("partition missing on one side");
    const auto& fb = it->second;
    const auto& single = fa.size() == 1 ? fa.front() : fb.size() == 1 ? fb.front() : Positions{};
    if (single.empty()) return fail("neither side has a single family per partition");
    const auto& many = fa.size() == 1 ? fb : fa;
    auto product = [](const Positions& p) {
      std::uint64_t n = 1;
      for (const auto& s : p) n *= s.size();
      return n;
    };
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < many.size(); ++i) {
      for (std::size_t pos = 0; pos < single.size(); ++pos) {
        if (!std::includes(single[pos].begin(), single[pos].end(), many[i][pos].begin(), many[i][pos].end())) {
          return fail("a family is not contained in its partition's product");
        }
      }
      for (std::size_t j = 0; j < i; ++j) {
        bool disjoint = false;
        for (std::size_t pos = 0; pos < single.size() && !disjoint; ++pos) {
          std::vector<std::string> common;
          std::set_intersection(many[i][pos].begin(), many[i][pos].end(), many[j][pos].begin(), many[j][pos].end(),
                                std::back_inserter(common));
          disjoint = common.empty();
        }
        if (!disjoint) return fail("families overlap");
      }
      total += product(many[i]);
    }
    if (total != product(single)) return fail("per-partition counts differ");
  }
  return true;
}

}  // namespace webqa::testing
