#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace webqa::testing {

std::filesystem::path fixture_path(const std::string& relative) {
  return std::filesystem::path(WEBQA_FIXTURE_DIR) / relative;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PagePtr load_fixture_page(const std::string& relative) {
  return std::make_shared<const Webpage>(parse_html(read_file(fixture_path(relative)), relative));
}

std::shared_ptr<const BaselineProvider> fixture_provider() {
  static const auto provider =
      std::make_shared<const BaselineProvider>(Gazetteer::load(fixture_path("motivating/gazetteer.tsv")));
  return provider;
}

ExampleSet motivating_examples() {
  ExampleSet set{kQuestion, kKeywords, {}};
  set.examples.push_back(make_example("page_a", load_fixture_page("motivating/page_a.html"),
                                      StringSet{"PLDI'19", "POPL'21", "OOPSLA'17"}));
  set.examples.push_back(make_example("page_b", load_fixture_page("motivating/page_b.html"),
                                      StringSet{"PLDI'20", "CAV'18", "FMCAD'19"}));
  return set;
}

PagePtr heldout_page() { return load_fixture_page("motivating/heldout.html"); }

StringSet heldout_gold() { return StringSet{"PLDI'22", "POPL'23"}; }

GrammarConfig motivating_grammar() {
  GrammarConfig g;
  g.atoms = atom_grid({0.5, 1.0}, true, false, {"ORG"});
  g.k_grid = {1};
  g.delimiters = {","};
  g.guard_depth = 4;
  g.extractor_depth = 4;
  g.guard_pairs = false;
  g.guard_negation = false;
  g.filter_negation = false;
  g.filter_pairs = false;
  return g;
}

PagePtr make_page(const std::vector<std::string>& texts, const std::vector<int>& parents,
                  const std::vector<NodeType>& types) {
  std::vector<TreeNode> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    nodes.push_back({static_cast<NodeId>(i), texts[i], i < types.size() ? types[i] : NodeType::None});
    if (i > 0) edges.emplace_back(parents.at(i), static_cast<NodeId>(i));
  }
  return std::make_shared<const Webpage>(std::move(nodes), edges, 0);
}

}  // namespace webqa::testing
