#include "json.hpp"

#include "webqa/errors.hpp"
#include "webqa/webtree.hpp"

namespace webqa {

using nlohmann::json;

std::string corpus_to_json(const Corpus& corpus) {
  json pages = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Webpage& page = *corpus.page(i);
    json nodes = json::array();
    for (const auto& n : page.nodes_in_order()) {
      nodes.push_back({{"id", n.id}, {"text", n.text}, {"type", to_string(n.type)}});
    }
    json edges = json::array();
    for (const auto& [p, c] : page.edges()) edges.push_back({p, c});
    pages.push_back({{"id", corpus.id(i)},
                     {"source_uri", page.source_uri()},
                     {"nodes", std::move(nodes)},
                     {"edges", std::move(edges)},
                     {"root", page.root()}});
  }
  return json{{"pages", std::move(pages)}}.dump(1) + "\n";
}

Corpus corpus_from_json(std::string_view json_text) {
  Corpus corpus;
  try {
    const json doc = json::parse(json_text);
    for (const auto& p : doc.at("pages")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : p.at("nodes")) {
        nodes.push_back(TreeNode{n.at("id").get<NodeId>(), n.at("text").get<std::string>(),
                                 node_type_from_string(n.value("type", std::string("none")))});
      }
      std::vector<Edge> edges;
      for (const auto& e : p.at("edges")) edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
      std::string uri = p.contains("source_uri") && p["source_uri"].is_string()
                            ? p["source_uri"].get<std::string>()
                            : std::string();
      corpus.add(p.at("id").get<std::string>(),
                 std::make_shared<const Webpage>(std::move(nodes), edges, p.at("root").get<NodeId>(),
                                                 std::move(uri)));
    }
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed corpus file: ") + e.what());
  }
  return corpus;
}

}  // namespace webqa
