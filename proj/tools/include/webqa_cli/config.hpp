#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "webqa/nlp.hpp"
#include "webqa/suggest.hpp"
#include "webqa/synth.hpp"

namespace webqa::cli {

// Everything a command may need, read from the JSON config file and then adjusted by flags.
struct RunConfig {
  ProviderConfig provider;
  SynthConfig synth;

  // Atom grid: keyword thresholds come from `thresholds` when given, else from the step.
  double threshold_step = 0.05;
  std::optional<std::vector<double>> thresholds;
  bool keyword_atoms = true;
  bool answer_atoms = true;
  std::optional<std::vector<std::string>> atom_labels;  // defaults to provider.entity_labels

  bool kw_only = false;
  bool nl_only = false;

  std::size_t ensemble_size = 1000;
  std::uint64_t seed = 7;
  SuggestConfig suggest;
};

// Reads a config file; relative gazetteer and cache paths resolve against its directory.
// Throws ConfigError on malformed content.
RunConfig load_config(const std::optional<std::filesystem::path>& path);

// Fills synth.grammar.atoms from the atom settings, honoring kw_only / nl_only.
// Throws ConfigError when both are set.
void finalize_grammar(RunConfig& config);

}  // namespace webqa::cli
