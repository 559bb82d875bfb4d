#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "webqa/grammar.hpp"
#include "webqa/metrics.hpp"
#include "webqa/nlp.hpp"
#include "webqa/synth.hpp"
#include "webqa/webtree.hpp"

#include <ostream>

namespace webqa {
// Readable gtest failure output.
inline void PrintTo(const StringSet& set, std::ostream* os) {
  *os << "{";
  for (const auto& s : set) *os << " \"" << s << "\"";
  *os << " }";
}
inline void PrintTo(const TokenSet& set, std::ostream* os) {
  *os << "{";
  for (const auto& s : set) *os << " " << s;
  *os << " }";
}
}  // namespace webqa

namespace webqa::testing {

std::filesystem::path fixture_path(const std::string& relative);
std::string read_file(const std::filesystem::path& path);
PagePtr load_fixture_page(const std::string& relative);

inline const std::string kQuestion = "Which program committees has this researcher served on?";
inline const std::vector<std::string> kKeywords{"PC", "Program Committee", "Service"};

// Baseline provider with the motivating fixture gazetteer.
std::shared_ptr<const BaselineProvider> fixture_provider();

// The two labeled faculty pages.
ExampleSet motivating_examples();
PagePtr heldout_page();
StringSet heldout_gold();

// Small grid that still contains the motivating program.
GrammarConfig motivating_grammar();

// Hand-built page: texts and parent ids (parent of node 0 ignored), node types optional.
PagePtr make_page(const std::vector<std::string>& texts, const std::vector<int>& parents,
                  const std::vector<NodeType>& types = {});

}  // namespace webqa::testing
