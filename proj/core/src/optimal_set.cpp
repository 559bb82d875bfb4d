#include <algorithm>
#include <limits>

#include "json.hpp"
#include "webqa/errors.hpp"
#include "webqa/synth.hpp"

namespace webqa {

using nlohmann::json;

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CapExceeded("optimal program count overflows 64 bits");
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw CapExceeded("optimal program count overflows 64 bits");
  return out;
}

std::uint64_t block_size(const std::vector<BranchChoice>& block) {
  std::uint64_t n = 0;
  for (const auto& c : block) n = checked_add(n, c.extractors.size());
  return n;
}

std::uint64_t family_size(const ProgramFamily& family) {
  std::uint64_t n = 1;
  for (const auto& block : family.blocks) n = checked_mul(n, block_size(block));
  return n;
}

dsl::Branch pick(const std::vector<BranchChoice>& block, std::uint64_t r) {
  for (const auto& c : block) {
    if (r < c.extractors.size()) return {c.guard, c.extractors[r]};
    r -= c.extractors.size();
  }
  throw ContractViolation("branch index out of range");
}

std::size_t branch_size(const dsl::Guard& g, const dsl::Extractor& e) { return g.size() + e.size(); }

json ast(const std::string& canonical) { return json::parse(canonical); }

}  // namespace

Rational exact_f1(const CountTriple& total) {
  if (total.pred + total.gold == 0) return {1, 1};
  return {2 * total.tp, total.pred + total.gold};
}

OptimalSet::OptimalSet(std::string question, std::vector<std::string> keywords, Rational f1,
                       std::vector<ProgramFamily> families, SynthStats stats)
    : question_(std::move(question)),
      keywords_(std::move(keywords)),
      f1_(f1),
      families_(std::move(families)),
      stats_(stats) {}

std::uint64_t OptimalSet::count() const {
  std::uint64_t n = 0;
  for (const auto& f : families_) n = checked_add(n, family_size(f));
  return n;
}

dsl::Program OptimalSet::program(std::uint64_t index) const {
  for (const auto& family : families_) {
    const std::uint64_t size = family_size(family);
    if (index >= size) {
      index -= size;
      continue;
    }
    dsl::Program p{{}, question_, keywords_};
    std::vector<dsl::Branch> branches;
    for (auto it = family.blocks.rbegin(); it != family.blocks.rend(); ++it) {
      const std::uint64_t radix = block_size(*it);
      branches.push_back(pick(*it, index % radix));
      index /= radix;
    }
    p.branches.assign(branches.rbegin(), branches.rend());
    return p;
  }
  throw ContractViolation("program index out of range");
}

dsl::Program OptimalSet::sample(std::mt19937_64& rng) const {
  const std::uint64_t n = count();
  if (n == 0) throw ContractViolation("cannot sample from an empty optimal set");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return program(dist(rng));
}

bool OptimalSet::contains(const dsl::Program& program) const {
  for (const auto& family : families_) {
    if (family.blocks.size() != program.branches.size()) continue;
    bool all = true;
    for (std::size_t i = 0; all && i < family.blocks.size(); ++i) {
      const auto& branch = program.branches[i];
      all = std::any_of(family.blocks[i].begin(), family.blocks[i].end(), [&](const BranchChoice& c) {
        return c.guard == branch.guard &&
               std::find(c.extractors.begin(), c.extractors.end(), branch.extractor) != c.extractors.end();
      });
    }
    if (all) return true;
  }
  return false;
}

std::vector<dsl::Program> OptimalSet::programs(std::uint64_t cap) const {
  const std::uint64_t n = count();
  if (n > cap) {
    throw CapExceeded("optimal set holds " + std::to_string(n) + " programs, more than the cap of " +
                      std::to_string(cap));
  }
  std::vector<dsl::Program> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(program(i));
  return out;
}

std::set<std::string> OptimalSet::canonical_set(std::uint64_t cap) const {
  std::set<std::string> out;
  for (const auto& p : programs(cap)) out.insert(dsl::canonical_serialize(p));
  return out;
}

OptimalSet OptimalSet::shortest() const {
  std::vector<std::size_t> family_min;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& family : families_) {
    std::size_t total = 0;
    for (const auto& block : family.blocks) {
      std::size_t m = std::numeric_limits<std::size_t>::max();
      for (const auto& c : block)
        for (const auto& e : c.extractors) m = std::min(m, branch_size(c.guard, e));
      total += m;
    }
    family_min.push_back(total);
    best = std::min(best, total);
  }
  std::vector<ProgramFamily> kept;
  for (std::size_t f = 0; f < families_.size(); ++f) {
    if (family_min[f] != best) continue;
    ProgramFamily family{families_[f].partition, {}};
    for (const auto& block : families_[f].blocks) {
      std::size_t m = std::numeric_limits<std::size_t>::max();
      for (const auto& c : block)
        for (const auto& e : c.extractors) m = std::min(m, branch_size(c.guard, e));
      std::vector<BranchChoice> filtered;
      for (const auto& c : block) {
        BranchChoice keep{c.guard, {}};
        for (const auto& e : c.extractors)
          if (branch_size(c.guard, e) == m) keep.extractors.push_back(e);
        if (!keep.extractors.empty()) filtered.push_back(std::move(keep));
      }
      family.blocks.push_back(std::move(filtered));
    }
    kept.push_back(std::move(family));
  }
  return {question_, keywords_, f1_, std::move(kept), stats_};
}

std::string OptimalSet::to_json(std::uint64_t expand_cap) const {
  json families = json::array();
  for (const auto& family : families_) {
    json blocks = json::array();
    for (const auto& block : family.blocks) {
      json choices = json::array();
      for (const auto& c : block) {
        json extractors = json::array();
        for (const auto& e : c.extractors) extractors.push_back(ast(e.canonical()));
        choices.push_back({{"guard", ast(c.guard.canonical())}, {"extractors", std::move(extractors)}});
      }
      blocks.push_back(std::move(choices));
    }
    families.push_back({{"partition", family.partition}, {"blocks", std::move(blocks)}});
  }
  const std::uint64_t n = count();
  json out{{"question", question_},
           {"keywords", keywords_},
           {"f1", {{"num", f1_.num}, {"den", f1_.den}, {"value", f1_.value()}}},
           {"count", n},
           {"families", std::move(families)},
           {"stats",
            {{"locator_expansions", stats_.locator_expansions},
             {"extractor_expansions", stats_.extractor_expansions},
             {"pruned_locators", stats_.pruned_locators},
             {"pruned_extractors", stats_.pruned_extractors},
             {"skipped_guards", stats_.skipped_guards},
             {"extractor_memo_hits", stats_.extractor_memo_hits},
             {"branch_memo_hits", stats_.branch_memo_hits},
             {"passes", stats_.passes},
             {"partitions", stats_.partitions}}}};
  if (n <= expand_cap) {
    json programs = json::array();
    for (std::uint64_t i = 0; i < n; ++i) programs.push_back(json::parse(dsl::canonical_serialize(program(i))));
    out["programs"] = std::move(programs);
  }
  return out.dump(1) + "\n";
}

OptimalSet OptimalSet::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    std::vector<ProgramFamily> families;
    for (const auto& f : doc.at("families")) {
      ProgramFamily family{f.at("partition").get<Partition>(), {}};
      for (const auto& b : f.at("blocks")) {
        std::vector<BranchChoice> block;
        for (const auto& c : b) {
          BranchChoice choice{dsl::parse_guard(c.at("guard").dump()), {}};
          for (const auto& e : c.at("extractors")) choice.extractors.push_back(dsl::parse_extractor(e.dump()));
          block.push_back(std::move(choice));
        }
        family.blocks.push_back(std::move(block));
      }
      families.push_back(std::move(family));
    }
    SynthStats stats;
    if (doc.contains("stats")) {
      const auto& s = doc.at("stats");
      stats.locator_expansions = s.value("locator_expansions", std::uint64_t{0});
      stats.extractor_expansions = s.value("extractor_expansions", std::uint64_t{0});
      stats.pruned_locators = s.value("pruned_locators", std::uint64_t{0});
      stats.pruned_extractors = s.value("pruned_extractors", std::uint64_t{0});
      stats.skipped_guards = s.value("skipped_guards", std::uint64_t{0});
      stats.extractor_memo_hits = s.value("extractor_memo_hits", std::uint64_t{0});
      stats.branch_memo_hits = s.value("branch_memo_hits", std::uint64_t{0});
      stats.passes = s.value("passes", std::uint64_t{0});
      stats.partitions = s.value("partitions", std::uint64_t{0});
    }
    const Rational f1{doc.at("f1").at("num").get<std::int64_t>(), doc.at("f1").at("den").get<std::int64_t>()};
    if (f1.den <= 0) throw ContractViolation("f1 denominator must be positive");
    return {doc.at("question").get<std::string>(), doc.at("keywords").get<std::vector<std::string>>(), f1,
            std::move(families), stats};
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed program set: ") + e.what());
  }
}

}  // namespace webqa
