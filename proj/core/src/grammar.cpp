#include "webqa/grammar.hpp"

#include <algorithm>
#include <cmath>

#include "webqa/errors.hpp"

namespace webqa {

using dsl::Extractor;
using dsl::Guard;
using dsl::Locator;
using dsl::NodeFilter;
using dsl::Pred;

std::vector<double> threshold_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw ConfigError("threshold step must lie in (0, 1]");
  std::vector<double> out;
  for (int i = 1;; ++i) {
    const double t = std::round(i * step * 100.0) / 100.0;
    if (t > 1.0 + 1e-12) break;
    out.push_back(std::min(t, 1.0));
    if (t >= 1.0) break;
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PredicateKind> atom_grid(const std::vector<double>& thresholds, bool with_keywords, bool with_answer,
                                     const std::vector<std::string>& entity_labels) {
  std::vector<PredicateKind> out;
  if (with_keywords) {
    for (double t : thresholds) out.push_back(PredicateKind::keyword(t));
  }
  if (with_answer) out.push_back(PredicateKind::answer());
  for (const auto& label : entity_labels) out.push_back(PredicateKind::entity(label));
  return out;
}

std::vector<Pred> guard_predicates(const GrammarConfig& cfg) {
  std::vector<Pred> atoms;
  for (const auto& kind : cfg.atoms) atoms.push_back(Pred::atom(kind));

  std::vector<Pred> out{Pred::top()};
  out.insert(out.end(), atoms.begin(), atoms.end());
  if (cfg.guard_negation) {
    for (const auto& a : atoms) out.push_back(Pred::negate(a));
  }
  if (cfg.guard_pairs) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) out.push_back(Pred::both(atoms[i], atoms[j]));
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) out.push_back(Pred::either(atoms[i], atoms[j]));
  }
  return out;
}

std::vector<NodeFilter> node_filters(const GrammarConfig& cfg) {
  std::vector<NodeFilter> atoms{NodeFilter::is_leaf(), NodeFilter::is_elem()};
  for (const auto& kind : cfg.node_filter_atoms()) {
    atoms.push_back(NodeFilter::match_text(Pred::atom(kind), false));
    atoms.push_back(NodeFilter::match_text(Pred::atom(kind), true));
  }

  std::vector<NodeFilter> out{NodeFilter::top()};
  out.insert(out.end(), atoms.begin(), atoms.end());
  if (cfg.filter_negation) {
    for (const auto& a : atoms) out.push_back(NodeFilter::negate(a));
  }
  if (cfg.filter_pairs) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) out.push_back(NodeFilter::both(atoms[i], atoms[j]));
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) out.push_back(NodeFilter::either(atoms[i], atoms[j]));
  }
  return out;
}

std::vector<Guard> gen_guards(const Locator& locator, const std::vector<Pred>& formulas) {
  std::vector<Guard> out{Guard::is_singleton(locator)};
  out.reserve(formulas.size() + 1);
  for (const auto& phi : formulas) out.push_back(Guard::sat(locator, phi));
  return out;
}

std::vector<Guard> gen_guards(const Locator& locator, const GrammarConfig& cfg) {
  return gen_guards(locator, guard_predicates(cfg));
}

std::vector<Locator> apply_production_locator(const Locator& locator, const GrammarConfig& cfg,
                                              const std::vector<NodeFilter>& filters) {
  if (cfg.guard_depth < 2 || locator.depth() + 1 > cfg.guard_depth - 1) return {};
  std::vector<Locator> out;
  out.reserve(2 * filters.size());
  for (const auto& f : filters) out.push_back(Locator::children(locator, f));
  for (const auto& f : filters) out.push_back(Locator::descendants(locator, f));
  return out;
}

std::vector<Locator> apply_production_locator(const Locator& locator, const GrammarConfig& cfg) {
  return apply_production_locator(locator, cfg, node_filters(cfg));
}

std::vector<Extractor> apply_production_extractor(const Extractor& extractor, const GrammarConfig& cfg) {
  if (extractor.depth() >= cfg.extractor_depth) return {};
  std::vector<Extractor> out;
  for (const auto& kind : cfg.atoms) {
    for (int k : cfg.k_grid) out.push_back(Extractor::substring(extractor, Pred::atom(kind), k));
  }
  for (const auto& kind : cfg.atoms) out.push_back(Extractor::filter(extractor, Pred::atom(kind)));
  for (const auto& c : cfg.delimiters) {
    if (extractor.op() == Extractor::Op::Split && extractor.delimiter() == c) continue;
    out.push_back(Extractor::split(extractor, c));
  }
  return out;
}

namespace {

template <typename T>
void sort_by_depth_then_canonical(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) {
    if (a.depth() != b.depth()) return a.depth() < b.depth();
    return a.canonical() < b.canonical();
  });
}

}  // namespace

std::vector<Locator> enumerate_locators(const GrammarConfig& cfg) {
  const auto filters = node_filters(cfg);
  std::vector<Locator> out{Locator::root()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto next = apply_production_locator(out[i], cfg, filters);
    out.insert(out.end(), next.begin(), next.end());
  }
  sort_by_depth_then_canonical(out);
  return out;
}

std::vector<Extractor> enumerate_extractors(const GrammarConfig& cfg) {
  std::vector<Extractor> out{Extractor::content()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto next = apply_production_extractor(out[i], cfg);
    out.insert(out.end(), next.begin(), next.end());
  }
  sort_by_depth_then_canonical(out);
  return out;
}

}  // namespace webqa
