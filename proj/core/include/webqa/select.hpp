#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "webqa/dsl.hpp"
#include "webqa/synth.hpp"
#include "webqa/text.hpp"

namespace webqa {

// Programs drawn uniformly, with replacement, from an optimal set.
struct Ensemble {
  std::vector<dsl::Program> members;
  std::uint64_t seed = 0;
};

// Throws ContractViolation when the set is empty or size is zero.
Ensemble build_ensemble(const OptimalSet& optimal, std::size_t size, std::uint64_t seed);

// Outputs of every ensemble member on every unlabeled page. Members with the same canonical
// form share one row.
class OutputMatrix {
 public:
  [[nodiscard]] std::size_t members() const noexcept { return row_of_member_.size(); }
  [[nodiscard]] std::size_t inputs() const noexcept { return inputs_; }
  [[nodiscard]] const std::vector<StringSet>& row(std::size_t member) const {
    return rows_[row_of_member_.at(member)];
  }
  [[nodiscard]] const std::vector<std::vector<StringSet>>& distinct_rows() const noexcept { return rows_; }
  [[nodiscard]] const std::vector<std::string>& distinct_programs() const noexcept { return keys_; }
  // Number of members sharing each distinct row.
  [[nodiscard]] std::vector<std::size_t> multiplicities() const;

  friend OutputMatrix ensemble_outputs(const Ensemble& ensemble, std::span<const PagePtr> inputs,
                                       const PredicateProvider& provider);

 private:
  std::size_t inputs_ = 0;
  std::vector<std::vector<StringSet>> rows_;
  std::vector<std::vector<TokenSet>> row_tokens_;
  std::vector<std::string> keys_;
  std::vector<std::size_t> row_of_member_;

  friend std::uint64_t transductive_loss(std::span<const StringSet> outputs, const OutputMatrix& matrix);
};

OutputMatrix ensemble_outputs(const Ensemble& ensemble, std::span<const PagePtr> inputs,
                              const PredicateProvider& provider);

// Σ_j Σ_k hamming(outputs[k], O_j[k]).
std::uint64_t transductive_loss(std::span<const StringSet> outputs, const OutputMatrix& matrix);

struct Candidate {
  dsl::Program program;
  std::string canonical;
  std::size_t size = 0;
  std::size_t multiplicity = 0;
  std::uint64_t loss = 0;
};

struct Selection {
  dsl::Program chosen;
  std::uint64_t loss = 0;
  std::vector<Candidate> candidates;  // distinct ensemble members, in first-draw order

  [[nodiscard]] std::string report_json() const;
};

// Ensemble member with the least summed loss; ties go to the smaller program, then the
// smaller canonical string.
Selection select_program(const OptimalSet& optimal, std::span<const PagePtr> unlabeled, std::size_t ensemble_size,
                         std::uint64_t seed, const PredicateProvider& provider);
Selection select_from_ensemble(const Ensemble& ensemble, std::span<const PagePtr> unlabeled,
                               const PredicateProvider& provider);

dsl::Program select_random(const OptimalSet& optimal, std::uint64_t seed);
dsl::Program select_shortest(const OptimalSet& optimal, std::uint64_t seed);

}  // namespace webqa
