#include "webqa/suggest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"

namespace webqa {

using dsl::Locator;
using dsl::NodeFilter;
using dsl::Pred;

namespace {

// Keyword and answer templates need keywords and a question respectively.
std::vector<Locator> template_locators(const QueryContext& query, const SuggestConfig& config) {
  std::vector<NodeFilter> filters{NodeFilter::top(), NodeFilter::is_leaf(), NodeFilter::is_elem()};
  if (!query.keywords.empty()) {
    filters.push_back(NodeFilter::match_text(Pred::atom(PredicateKind::keyword(config.keyword_threshold)), false));
  }
  if (!query.question.empty()) filters.push_back(NodeFilter::match_text(Pred::atom(PredicateKind::answer()), false));
  for (const auto& label : config.entity_labels) {
    filters.push_back(NodeFilter::match_text(Pred::atom(PredicateKind::entity(label)), false));
  }
  std::vector<Locator> out;
  for (const auto& f : filters) out.push_back(Locator::children(Locator::root(), f));
  for (const auto& f : filters) out.push_back(Locator::descendants(Locator::root(), f));
  return out;
}

}  // namespace

PageFeatures featurize(const Webpage& page, const QueryContext& query, const PredicateProvider& provider,
                       const SuggestConfig& config) {
  const dsl::EvalEnv env{page, query, provider};
  PageFeatures out;
  for (const auto& locator : template_locators(query, config)) {
    out.push_back(dsl::eval_locator(locator, env).empty() ? 0.0 : 1.0);
  }

  // Sections whose heading matches a keyword, and the entities inside them.
  NodeSet sections;
  if (!query.keywords.empty()) {
    sections = dsl::eval_locator(
        Locator::descendants(Locator::root(),
                             NodeFilter::match_text(Pred::atom(PredicateKind::keyword(config.keyword_threshold)), false)),
        env);
  }
  std::set<NodeId> inside;
  for (NodeId s : sections) {
    inside.insert(s);
    for (NodeId d : page.descendants(s)) inside.insert(d);
  }
  for (const auto& label : config.entity_labels) {
    std::size_t hits = 0;
    for (NodeId n : inside) {
      if (provider.has_entity(page.node(n).text, label).holds) ++hits;
    }
    out.push_back(std::log1p(static_cast<double>(hits)));
  }

  std::size_t max_depth = 0;
  std::size_t lists = 0;
  std::size_t tables = 0;
  std::size_t leaves = 0;
  for (const TreeNode& node : page.nodes_in_order()) {
    max_depth = std::max<std::size_t>(max_depth, page.depth_of(node.id));
    if (node.type == NodeType::List) ++lists;
    if (node.type == NodeType::Table) ++tables;
    if (page.is_leaf(node.id)) ++leaves;
  }
  for (std::size_t v : {max_depth, lists, tables, leaves, page.size()}) out.push_back(std::log1p(static_cast<double>(v)));
  return out;
}

double l1_distance(const PageFeatures& a, const PageFeatures& b) {
  if (a.size() != b.size()) throw ContractViolation("feature vectors differ in length");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

Clustering k_medoids(std::span<const PageFeatures> points, std::size_t k, std::uint64_t seed) {
  Clustering c;
  if (points.empty() || k == 0) return c;

  std::mt19937_64 rng(seed);
  c.medoids.push_back(std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng));
  while (c.medoids.size() < k) {
    std::size_t far = 0;
    double far_d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (auto m : c.medoids) nearest = std::min(nearest, l1_distance(points[i], points[m]));
      if (nearest > far_d) {
        far_d = nearest;
        far = i;
      }
    }
    if (far_d == 0.0) break;
    c.medoids.push_back(far);
  }

  c.assignment.assign(points.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < c.medoids.size(); ++m) {
        const double d = l1_distance(points[i], points[c.medoids[m]]);
        if (d < best) {
          best = d;
          c.assignment[i] = m;
        }
      }
    }
    bool changed = false;
    for (std::size_t m = 0; m < c.medoids.size(); ++m) {
      auto cost = [&](std::size_t candidate) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (c.assignment[i] == m) total += l1_distance(points[i], points[candidate]);
        }
        return total;
      };
      std::size_t best = c.medoids[m];
      double best_cost = cost(best);
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (c.assignment[i] != m) continue;
        const double ci = cost(i);
        if (ci < best_cost) {
          best_cost = ci;
          best = i;
        }
      }
      if (best != c.medoids[m]) {
        c.medoids[m] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return c;
}

std::vector<std::string> suggest_labels(const Corpus& corpus, const std::vector<std::string>& labeled,
                                        std::size_t budget, const QueryContext& query,
                                        const PredicateProvider& provider, const SuggestConfig& config) {
  if (budget == 0) throw ContractViolation("suggestion budget must be at least 1");
  if (budget > config.max_budget) {
    throw ContractViolation("suggestion budget is limited to " + std::to_string(config.max_budget) + " pages");
  }
  const std::set<std::string> known(labeled.begin(), labeled.end());
  for (const auto& id : known) (void)corpus.at(id);

  std::vector<std::string> unlabeled;
  for (const auto& id : corpus.ids()) {
    if (!known.contains(id)) unlabeled.push_back(id);
  }
  if (unlabeled.size() < budget) return unlabeled;

  std::vector<PageFeatures> features;
  for (std::size_t i = 0; i < corpus.size(); ++i) features.push_back(featurize(*corpus.page(i), query, provider, config));
  const Clustering clusters = k_medoids(features, budget, config.seed);

  std::vector<std::string> out;
  for (std::size_t m = 0; m < clusters.medoids.size(); ++m) {
    bool represented = false;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (clusters.assignment[i] == m && known.contains(corpus.id(i))) represented = true;
    }
    if (!represented) out.push_back(corpus.id(clusters.medoids[m]));
  }
  return out;
}

}  // namespace webqa
