#include "webqa/select.hpp"

#include <map>
#include <random>
#include <tuple>

#include "json.hpp"
#include "webqa/errors.hpp"
#include "webqa/metrics.hpp"

namespace webqa {

Ensemble build_ensemble(const OptimalSet& optimal, std::size_t size, std::uint64_t seed) {
  if (optimal.empty()) throw ContractViolation("cannot build an ensemble from an empty optimal set");
  if (size == 0) throw ContractViolation("ensemble size must be at least 1");
  std::mt19937_64 rng(seed);
  Ensemble ensemble{{}, seed};
  ensemble.members.reserve(size);
  for (std::size_t i = 0; i < size; ++i) ensemble.members.push_back(optimal.sample(rng));
  return ensemble;
}

std::vector<std::size_t> OutputMatrix::multiplicities() const {
  std::vector<std::size_t> out(rows_.size(), 0);
  for (auto r : row_of_member_) ++out[r];
  return out;
}

OutputMatrix ensemble_outputs(const Ensemble& ensemble, std::span<const PagePtr> inputs,
                              const PredicateProvider& provider) {
  OutputMatrix m;
  m.inputs_ = inputs.size();
  std::map<std::string, std::size_t> seen;
  for (const auto& program : ensemble.members) {
    std::string key = dsl::canonical_serialize(program);
    auto [it, fresh] = seen.emplace(key, m.rows_.size());
    if (fresh) {
      std::vector<StringSet> row;
      std::vector<TokenSet> tokens;
      for (const auto& page : inputs) {
        row.push_back(dsl::eval_program(program, *page, provider));
        tokens.push_back(tokenize_all(row.back()));
      }
      m.rows_.push_back(std::move(row));
      m.row_tokens_.push_back(std::move(tokens));
      m.keys_.push_back(std::move(key));
    }
    m.row_of_member_.push_back(it->second);
  }
  return m;
}

std::uint64_t transductive_loss(std::span<const StringSet> outputs, const OutputMatrix& matrix) {
  if (outputs.size() != matrix.inputs_) throw ContractViolation("one output per unlabeled input is required");
  std::vector<TokenSet> mine;
  for (const auto& o : outputs) mine.push_back(tokenize_all(o));
  const auto weights = matrix.multiplicities();
  std::uint64_t total = 0;
  for (std::size_t r = 0; r < matrix.row_tokens_.size(); ++r) {
    std::uint64_t row_loss = 0;
    for (std::size_t k = 0; k < mine.size(); ++k) row_loss += hamming(mine[k], matrix.row_tokens_[r][k]);
    total += row_loss * weights[r];
  }
  return total;
}

Selection select_from_ensemble(const Ensemble& ensemble, std::span<const PagePtr> unlabeled,
                               const PredicateProvider& provider) {
  if (ensemble.members.empty()) throw ContractViolation("cannot select from an empty ensemble");
  const OutputMatrix matrix = ensemble_outputs(ensemble, unlabeled, provider);
  const auto weights = matrix.multiplicities();

  Selection sel;
  std::map<std::string, std::size_t> index;
  for (const auto& program : ensemble.members) {
    std::string key = dsl::canonical_serialize(program);
    if (index.contains(key)) continue;
    const std::size_t row = index.size();
    index.emplace(key, row);
    sel.candidates.push_back(
        {program, key, program.size(), weights[row], transductive_loss(matrix.distinct_rows()[row], matrix)});
  }

  const Candidate* best = &sel.candidates.front();
  for (const auto& c : sel.candidates) {
    if (std::tie(c.loss, c.size, c.canonical) < std::tie(best->loss, best->size, best->canonical)) best = &c;
  }
  sel.chosen = best->program;
  sel.loss = best->loss;
  return sel;
}

Selection select_program(const OptimalSet& optimal, std::span<const PagePtr> unlabeled, std::size_t ensemble_size,
                         std::uint64_t seed, const PredicateProvider& provider) {
  return select_from_ensemble(build_ensemble(optimal, ensemble_size, seed), unlabeled, provider);
}

dsl::Program select_random(const OptimalSet& optimal, std::uint64_t seed) {
  if (optimal.empty()) throw ContractViolation("cannot select from an empty optimal set");
  std::mt19937_64 rng(seed);
  return optimal.sample(rng);
}

dsl::Program select_shortest(const OptimalSet& optimal, std::uint64_t seed) {
  if (optimal.empty()) throw ContractViolation("cannot select from an empty optimal set");
  std::mt19937_64 rng(seed);
  return optimal.shortest().sample(rng);
}

std::string Selection::report_json() const {
  using nlohmann::json;
  json cands = json::array();
  for (const auto& c : candidates) {
    cands.push_back({{"program", json::parse(c.canonical)},
                     {"size", c.size},
                     {"multiplicity", c.multiplicity},
                     {"loss", c.loss}});
  }
  json out{{"chosen", json::parse(dsl::canonical_serialize(chosen))}, {"loss", loss}, {"candidates", cands}};
  return out.dump(1) + "\n";
}

}  // namespace webqa
