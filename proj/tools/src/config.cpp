#include "webqa_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "webqa/errors.hpp"
#include "webqa/grammar.hpp"

namespace webqa::cli {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig load_config(const std::optional<std::filesystem::path>& path) {
  RunConfig cfg;
  if (!path) return cfg;
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path->string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::filesystem::path base = path->parent_path();
  bool suggest_labels_set = false;

  try {
    const json root = json::parse(buffer.str());
    check_keys(root, "", {"provider", "grammar", "synth", "select", "suggest"});

    if (root.contains("provider")) {
      const json& p = root["provider"];
      check_keys(p, "provider", {"mode", "endpoint", "cache_path", "entity_labels", "gazetteers"});
      const std::string mode = p.value("mode", "baseline");
      if (mode == "baseline") {
        cfg.provider.mode = ProviderConfig::Mode::Baseline;
      } else if (mode == "remote") {
        cfg.provider.mode = ProviderConfig::Mode::Remote;
      } else {
        throw ConfigError("provider.mode must be 'baseline' or 'remote'");
      }
      read(p, "endpoint", cfg.provider.endpoint);
      read(p, "entity_labels", cfg.provider.entity_labels);
      if (p.contains("cache_path")) cfg.provider.cache_path = resolve(base, p["cache_path"].get<std::string>());
      if (p.contains("gazetteers")) {
        for (const auto& g : p["gazetteers"]) cfg.provider.gazetteers.push_back(resolve(base, g.get<std::string>()));
      }
    }

    if (root.contains("grammar")) {
      const json& g = root["grammar"];
      check_keys(g, "grammar",
                 {"threshold_step", "thresholds", "keyword_atoms", "answer_atoms", "entity_labels", "k_grid",
                  "delimiters", "guard_depth", "extractor_depth", "guard_negation", "guard_pairs", "filter_negation",
                  "filter_pairs", "kw_only", "nl_only"});
      read(g, "threshold_step", cfg.threshold_step);
      if (g.contains("thresholds")) cfg.thresholds = g["thresholds"].get<std::vector<double>>();
      read(g, "keyword_atoms", cfg.keyword_atoms);
      read(g, "answer_atoms", cfg.answer_atoms);
      if (g.contains("entity_labels")) cfg.atom_labels = g["entity_labels"].get<std::vector<std::string>>();
      GrammarConfig& gr = cfg.synth.grammar;
      read(g, "k_grid", gr.k_grid);
      read(g, "delimiters", gr.delimiters);
      read(g, "guard_depth", gr.guard_depth);
      read(g, "extractor_depth", gr.extractor_depth);
      read(g, "guard_negation", gr.guard_negation);
      read(g, "guard_pairs", gr.guard_pairs);
      read(g, "filter_negation", gr.filter_negation);
      read(g, "filter_pairs", gr.filter_pairs);
      read(g, "kw_only", cfg.kw_only);
      read(g, "nl_only", cfg.nl_only);
    }

    if (root.contains("synth")) {
      const json& s = root["synth"];
      check_keys(s, "synth", {"no_prune", "no_decomp", "max_examples", "brute_force_cap"});
      read(s, "no_prune", cfg.synth.no_prune);
      read(s, "no_decomp", cfg.synth.no_decomp);
      read(s, "max_examples", cfg.synth.max_examples);
      read(s, "brute_force_cap", cfg.synth.brute_force_cap);
    }

    if (root.contains("select")) {
      const json& s = root["select"];
      check_keys(s, "select", {"n", "seed"});
      read(s, "n", cfg.ensemble_size);
      read(s, "seed", cfg.seed);
    }

    if (root.contains("suggest")) {
      const json& s = root["suggest"];
      check_keys(s, "suggest", {"keyword_threshold", "entity_labels", "seed", "max_budget"});
      read(s, "keyword_threshold", cfg.suggest.keyword_threshold);
      read(s, "entity_labels", cfg.suggest.entity_labels);
      suggest_labels_set = s.contains("entity_labels");
      read(s, "seed", cfg.suggest.seed);
      read(s, "max_budget", cfg.suggest.max_budget);
    }
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path->string() + ": " + e.what());
  }
  if (!suggest_labels_set) cfg.suggest.entity_labels = cfg.provider.entity_labels;
  return cfg;
}

void finalize_grammar(RunConfig& config) {
  if (config.kw_only && config.nl_only) throw ConfigError("kw_only and nl_only are mutually exclusive");
  if (config.threshold_step <= 0.0 || config.threshold_step > 1.0) {
    throw ConfigError("grammar.threshold_step must lie in (0, 1]");
  }
  const std::vector<double> thresholds = config.thresholds ? *config.thresholds : threshold_grid(config.threshold_step);
  const bool keywords = config.keyword_atoms && !config.nl_only;
  const bool answer = config.answer_atoms && !config.kw_only;
  const auto& labels = config.atom_labels ? *config.atom_labels : config.provider.entity_labels;
  for (const auto& l : labels) {
    if (std::find(config.provider.entity_labels.begin(), config.provider.entity_labels.end(), l) ==
        config.provider.entity_labels.end()) {
      throw ConfigError("grammar entity label '" + l + "' is not in the provider vocabulary");
    }
  }
  GrammarConfig& g = config.synth.grammar;
  g.atoms = atom_grid(thresholds, keywords, answer, labels);
  if (g.atoms.empty()) throw ConfigError("the grammar has no NLP atoms");
  if (g.k_grid.empty() || g.delimiters.empty()) throw ConfigError("k_grid and delimiters must be nonempty");
  if (g.guard_depth < 1 || g.extractor_depth < 1) throw ConfigError("depth limits must be at least 1");
}

}  // namespace webqa::cli
