#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "webqa/nlp.hpp"
#include "webqa/webtree.hpp"

namespace webqa {

struct SuggestConfig {
  double keyword_threshold = 0.5;
  std::vector<std::string> entity_labels = default_entity_labels();
  std::uint64_t seed = 1;
  std::size_t max_budget = 5;
};

using PageFeatures = std::vector<double>;

// Nonemptiness of shallow template locators, entity counts inside keyword-matching sections,
// and log-scaled structural counts. Dimensionality depends only on the config and on whether the
// query has keywords and a question.
PageFeatures featurize(const Webpage& page, const QueryContext& query, const PredicateProvider& provider,
                       const SuggestConfig& config);

double l1_distance(const PageFeatures& a, const PageFeatures& b);

// Indices of medoids in farthest-first order and the cluster of every point.
struct Clustering {
  std::vector<std::size_t> medoids;
  std::vector<std::size_t> assignment;
};

Clustering k_medoids(std::span<const PageFeatures> points, std::size_t k, std::uint64_t seed);

// Up to `budget` unlabeled page ids, one per cluster that holds no labeled page.
std::vector<std::string> suggest_labels(const Corpus& corpus, const std::vector<std::string>& labeled,
                                        std::size_t budget, const QueryContext& query,
                                        const PredicateProvider& provider, const SuggestConfig& config);

}  // namespace webqa
