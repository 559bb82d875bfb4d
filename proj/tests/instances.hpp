#pragma once

#include <random>
#include <string>

#include "webqa/synth.hpp"

namespace webqa::testing {

struct TinyInstance {
  ExampleSet examples;
  SynthConfig config;
  std::vector<PagePtr> unlabeled;
};

// Small random pages, labels and grammar: at most 4 pages, 3 labeled examples, guard and
// extractor depth at most 3, and at most 4 NLP atoms.
TinyInstance random_instance(std::mt19937_64& rng);

// Provider used with random instances: baseline rules plus a two-entry gazetteer.
const PredicateProvider& tiny_provider();

// Exact equality of the programs two optimal sets describe. On mismatch `why` says where.
bool same_programs(const OptimalSet& a, const OptimalSet& b, std::string* why = nullptr);

}  // namespace webqa::testing
