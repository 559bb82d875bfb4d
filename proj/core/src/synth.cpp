#include "webqa/synth.hpp"

#include <algorithm>

#include "webqa/errors.hpp"

namespace webqa {

using dsl::Extractor;
using dsl::Guard;
using dsl::Locator;

namespace {

Rational add(const Rational& a, const Rational& b) {
  if (a.den == b.den) return {a.num + b.num, a.den};
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

std::vector<std::size_t> members(ExampleMask mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1U) out.push_back(i);
  }
  return out;
}

ExampleMask mask_of(const std::vector<std::size_t>& block) {
  ExampleMask m = 0;
  for (auto i : block) m |= ExampleMask{1} << i;
  return m;
}

}  // namespace

// ---- Objective ----

Objective Objective::f1() {
  Objective o;
  o.is_f1_ = true;
  o.key_ = "f1";
  return o;
}

Objective Objective::linear(Rational lambda) {
  if (lambda.den <= 0) throw ContractViolation("objective weight needs a positive denominator");
  Objective o;
  o.is_f1_ = false;
  o.lambda_ = lambda;
  o.key_ = "linear:" + std::to_string(lambda.num) + "/" + std::to_string(lambda.den);
  return o;
}

Rational Objective::score(std::int64_t tp, std::int64_t pred, std::int64_t gold) const {
  if (is_f1_) return exact_f1({tp, pred, gold});
  return {2 * tp * lambda_.den - lambda_.num * (pred + gold), lambda_.den};
}

Rational Objective::bound(std::int64_t tp, std::int64_t gold) const {
  // An extension keeps at most `tp` covered tokens and predicts at least as many as it covers.
  return score(tp, tp, gold);
}

// ---- Synthesizer ----

Synthesizer::Synthesizer(const ExampleSet& examples, const PredicateProvider& provider, SynthConfig config)
    : examples_(examples),
      provider_(provider),
      config_(std::move(config)),
      query_(examples.query()),
      guard_formulas_(guard_predicates(config_.grammar)),
      node_filters_(node_filters(config_.grammar)) {
  if (examples_.examples.empty()) throw ContractViolation("synthesis needs at least one labeled example");
  if (examples_.size() > 8 * sizeof(ExampleMask)) throw CapExceeded("too many examples for one synthesis run");
}

std::int64_t Synthesizer::gold_tokens(ExampleMask mask) const {
  std::int64_t g = 0;
  for (auto i : members(mask)) g += static_cast<std::int64_t>(examples_.examples[i].gold_tokens.size());
  return g;
}

const Synthesizer::Located& Synthesizer::locate(const Locator& locator) {
  if (auto it = located_.find(locator.canonical()); it != located_.end()) return it->second;

  Located out;
  const Located* inner = locator.op() == Locator::Op::Root ? nullptr : &locate(locator.inner());
  for (std::size_t j = 0; j < examples_.size(); ++j) {
    const Example& ex = examples_.examples[j];
    const dsl::EvalEnv env{*ex.page, query_, provider_};
    NodeSet nodes = inner ? dsl::apply_locator_step(locator, inner->nodes[j], env) : NodeSet{ex.page->root()};

    TokenSet own;
    TokenSet subtree;
    for (NodeId n : nodes) {
      own.merge(tokenize(ex.page->node(n).text));
      subtree.merge(tokenize(ex.page->node_text(n, true)));
    }
    out.own_tp.push_back(static_cast<std::int64_t>(own.intersection_size(ex.gold_tokens)));
    out.subtree_tp.push_back(static_cast<std::int64_t>(subtree.intersection_size(ex.gold_tokens)));
    out.nodes.push_back(std::move(nodes));
  }
  return located_.emplace(locator.canonical(), std::move(out)).first->second;
}

bool Synthesizer::classifies(const Guard& guard, ExampleMask positive, ExampleMask negative) {
  const Located& loc = locate(guard.locator());
  auto holds = [&](std::size_t j) {
    const Example& ex = examples_.examples[j];
    const dsl::EvalEnv env{*ex.page, query_, provider_};
    return dsl::guard_holds(guard, loc.nodes[j], env);
  };
  for (auto j : members(positive)) {
    if (!holds(j)) return false;
  }
  for (auto j : members(negative)) {
    if (holds(j)) return false;
  }
  return true;
}

std::vector<LocatedExample> Synthesizer::propagate_examples(const Locator& locator, ExampleMask positive) {
  const Located& loc = locate(locator);
  std::vector<LocatedExample> out;
  for (auto j : members(positive)) {
    out.push_back({examples_.examples[j].page, loc.nodes[j], examples_.examples[j].gold_tokens});
  }
  return out;
}

// ---- guard stream ----

bool Synthesizer::GuardStream::Order::operator()(const Locator& a, const Locator& b) const {
  if (a.depth() != b.depth()) return a.depth() < b.depth();
  return a.canonical() < b.canonical();
}

Synthesizer::GuardStream::GuardStream(Synthesizer& owner, ExampleMask positive, ExampleMask negative,
                                      Objective objective)
    : owner_(owner),
      positive_(positive),
      negative_(negative),
      objective_(std::move(objective)),
      gold_(owner.gold_tokens(positive)) {
  worklist_.insert(Locator::root());
}

bool Synthesizer::GuardStream::prunable(const Locator& locator, const std::optional<Rational>& opt) {
  if (owner_.config_.no_prune || !opt) return false;
  const Located& loc = owner_.locate(locator);
  std::int64_t tp = 0;
  for (auto j : members(positive_)) tp += loc.subtree_tp[j];
  return objective_.bound(tp, gold_) < *opt;
}

void Synthesizer::GuardStream::extend(const Locator& locator, const std::optional<Rational>& opt) {
  for (auto& next : apply_production_locator(locator, owner_.config_.grammar, owner_.node_filters_)) {
    if (prunable(next, opt)) {
      ++owner_.stats_.pruned_locators;
      continue;
    }
    worklist_.insert(std::move(next));
  }
}

std::optional<Guard> Synthesizer::GuardStream::next(const std::optional<Rational>& opt) {
  while (true) {
    while (pending_pos_ < pending_.size()) {
      const Guard& g = pending_[pending_pos_++];
      if (owner_.classifies(g, positive_, negative_)) return g;
    }
    if (current_) {
      extend(*current_, opt);
      current_.reset();
    }
    if (worklist_.empty()) return std::nullopt;
    Locator locator = *worklist_.begin();
    worklist_.erase(worklist_.begin());
    if (prunable(locator, opt)) {
      ++owner_.stats_.pruned_locators;
      continue;
    }
    ++owner_.stats_.locator_expansions;
    pending_ = gen_guards(locator, owner_.guard_formulas_);
    pending_pos_ = 0;
    current_ = std::move(locator);
  }
}

// ---- extractor search ----

ExtractorResult Synthesizer::synthesize_extractors(const Locator& locator, ExampleMask positive,
                                                   const Objective& objective) {
  auto key = std::make_tuple(objective.key(), locator.canonical(), positive);
  if (auto it = extractor_memo_.find(key); it != extractor_memo_.end()) {
    ++stats_.extractor_memo_hits;
    return it->second;
  }
  ExtractorResult result = search_extractors(locator, positive, objective);
  extractor_memo_.emplace(std::move(key), result);
  return result;
}

ExtractorResult Synthesizer::search_extractors(const Locator& locator, ExampleMask positive,
                                               const Objective& objective) {
  const Located& loc = locate(locator);
  const auto pos = members(positive);
  const std::int64_t gold = gold_tokens(positive);
  const bool prune = !config_.no_prune;

  struct Item {
    Extractor extractor;
    std::vector<StringSet> outputs;
    std::int64_t tp = 0;
    std::int64_t pred = 0;
  };
  auto make_item = [&](Extractor e, std::vector<StringSet> outputs) {
    Item item{std::move(e), std::move(outputs)};
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const TokenSet tokens = tokenize_all(item.outputs[i]);
      item.tp += static_cast<std::int64_t>(tokens.intersection_size(examples_.examples[pos[i]].gold_tokens));
      item.pred += static_cast<std::int64_t>(tokens.size());
    }
    return item;
  };

  std::vector<StringSet> content;
  for (auto j : pos) content.push_back(dsl::extract_content(loc.nodes[j], *examples_.examples[j].page));

  ExtractorResult result;
  std::vector<Item> stack;
  stack.push_back(make_item(Extractor::content(), std::move(content)));
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    if (prune && result.best && objective.bound(item.tp, gold) < *result.best) {
      ++stats_.pruned_extractors;
      continue;
    }
    ++stats_.extractor_expansions;

    const Rational s = objective.score(item.tp, item.pred, gold);
    if (!result.best || s > *result.best) {
      result.best = s;
      result.optimal.clear();
    }
    if (s == *result.best) result.optimal.push_back({item.extractor, item.tp, item.pred});

    std::vector<Item> children;
    for (auto& next : apply_production_extractor(item.extractor, config_.grammar)) {
      std::vector<StringSet> outputs;
      outputs.reserve(pos.size());
      for (const auto& value : item.outputs) {
        outputs.push_back(dsl::apply_extractor_step(next, value, query_, provider_));
      }
      Item child = make_item(std::move(next), std::move(outputs));
      if (prune && objective.bound(child.tp, gold) < *result.best) {
        ++stats_.pruned_extractors;
        continue;
      }
      children.push_back(std::move(child));
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }
  return result;
}

// ---- branches ----

void Synthesizer::consider(BranchResult& result, const Guard& guard, const ExtractorResult& extractors) {
  if (!extractors.best) return;
  if (!result.best || *extractors.best > *result.best) {
    result.best = extractors.best;
    result.choices.clear();
    result.tp = extractors.optimal.front().tp;
    result.pred = extractors.optimal.front().pred;
  }
  if (*extractors.best == *result.best) {
    BranchChoice choice{guard, {}};
    for (const auto& s : extractors.optimal) choice.extractors.push_back(s.extractor);
    result.choices.push_back(std::move(choice));
  }
}

BranchResult Synthesizer::synthesize_branch(ExampleMask positive, ExampleMask negative, const Objective& objective) {
  if (positive == 0) throw ContractViolation("a branch needs at least one positive example");
  auto key = std::make_tuple(objective.key(), positive, negative);
  if (auto it = branch_memo_.find(key); it != branch_memo_.end()) {
    ++stats_.branch_memo_hits;
    return it->second;
  }

  BranchResult result;
  if (config_.no_decomp) {
    result = joint_branch(positive, negative, objective);
  } else {
    const std::int64_t gold = gold_tokens(positive);
    const auto pos = members(positive);
    GuardStream stream(*this, positive, negative, objective);
    while (auto guard = stream.next(result.best)) {
      if (!config_.no_prune && result.best) {
        const Located& loc = locate(guard->locator());
        std::int64_t tp = 0;
        for (auto j : pos) tp += loc.own_tp[j];
        if (objective.bound(tp, gold) < *result.best) {
          ++stats_.skipped_guards;
          continue;
        }
      }
      consider(result, *guard, synthesize_extractors(guard->locator(), positive, objective));
    }
  }
  branch_memo_.emplace(std::move(key), result);
  return result;
}

BranchResult Synthesizer::joint_branch(ExampleMask positive, ExampleMask negative, const Objective& objective) {
  BranchResult result;
  for (const auto& locator : enumerate_locators(config_.grammar)) {
    ++stats_.locator_expansions;
    for (const auto& guard : gen_guards(locator, guard_formulas_)) {
      if (!classifies(guard, positive, negative)) continue;
      consider(result, guard, search_extractors(locator, positive, objective));
    }
  }
  return result;
}

// ---- top level ----

OptimalSet Synthesizer::run() {
  const auto partitions = ordered_partitions(examples_.size(), config_.max_examples);
  stats_.partitions = partitions.size();
  const ExampleMask all = examples_.size() == 32 ? ~ExampleMask{0} : (ExampleMask{1} << examples_.size()) - 1;
  const std::int64_t total_gold = gold_tokens(all);

  // Block-wise maxima of 2·tp − λ·(pred + gold) add up; the global optimum is the λ at which the
  // best total is exactly zero. Each pass either proves that or finds a program with higher F1.
  Rational lambda = total_gold == 0 ? Rational{1, 1} : Rational{0, 1};
  while (true) {
    ++stats_.passes;
    const Objective objective = Objective::linear(lambda);
    std::optional<Rational> best_total;
    std::vector<std::optional<Rational>> totals(partitions.size());
    std::vector<std::vector<BranchResult>> results(partitions.size());
    std::size_t best_index = 0;

    for (std::size_t p = 0; p < partitions.size(); ++p) {
      const Partition& partition = partitions[p];
      ExampleMask later = all;
      Rational total{0, lambda.den};
      bool feasible = true;
      for (const auto& block : partition) {
        const ExampleMask pos = mask_of(block);
        later &= ~pos;
        BranchResult br = synthesize_branch(pos, later, objective);
        if (br.empty()) {
          feasible = false;
          break;
        }
        total = add(total, *br.best);
        results[p].push_back(std::move(br));
      }
      if (!feasible) {
        results[p].clear();
        continue;
      }
      totals[p] = total;
      if (!best_total || total > *best_total) {
        best_total = total;
        best_index = p;
      }
    }

    if (!best_total) return {examples_.question, examples_.keywords, {0, 1}, {}, stats_};

    const Rational zero{0, 1};
    if (*best_total > zero) {
      CountTriple composed{0, 0, total_gold};
      for (const auto& br : results[best_index]) {
        composed.tp += br.tp;
        composed.pred += br.pred;
      }
      const Rational improved = exact_f1(composed);
      if (!(improved > lambda)) throw ContractViolation("synthesis failed to improve on a positive pass");
      lambda = improved;
    } else if (*best_total < zero) {
      // Only reachable when no gold tokens exist and no program predicts nothing everywhere.
      lambda = {0, 1};
    } else {
      std::vector<ProgramFamily> families;
      for (std::size_t p = 0; p < partitions.size(); ++p) {
        if (!totals[p] || !(*totals[p] == zero)) continue;
        ProgramFamily family{partitions[p], {}};
        for (auto& br : results[p]) family.blocks.push_back(std::move(br.choices));
        families.push_back(std::move(family));
      }
      return {examples_.question, examples_.keywords, lambda, std::move(families), stats_};
    }
    branch_memo_.clear();
    extractor_memo_.clear();
  }
}

OptimalSet synthesize(const ExampleSet& examples, const PredicateProvider& provider, const SynthConfig& config) {
  if (config.pooled_recall) {
    throw ContractViolation("pooled recall cannot be decomposed per branch; synthesize with micro recall");
  }
  if (examples.examples.empty()) throw ContractViolation("synthesis needs at least one labeled example");
  if (examples.size() > config.max_examples) {
    throw CapExceeded("synthesis is limited to " + std::to_string(config.max_examples) + " labeled examples");
  }
  Synthesizer synthesizer(examples, provider, config);
  return synthesizer.run();
}

}  // namespace webqa
