#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "webqa/errors.hpp"
#include "webqa/nlp.hpp"

namespace webqa {
namespace {

using nlohmann::json;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json entry_to_json(const std::variant<PredicateVerdict, std::vector<Span>>& entry) {
  if (const auto* v = std::get_if<PredicateVerdict>(&entry)) return {{"holds", v->holds}, {"score", v->score}};
  json spans = json::array();
  for (const auto& s : std::get<std::vector<Span>>(entry)) {
    spans.push_back({{"start", s.start}, {"end", s.end}, {"text", s.text}, {"score", s.score}});
  }
  return {{"spans", std::move(spans)}};
}

std::variant<PredicateVerdict, std::vector<Span>> entry_from_json(const json& j) {
  if (j.contains("spans")) {
    std::vector<Span> spans;
    for (const auto& s : j.at("spans")) {
      spans.push_back(Span{s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                           s.at("text").get<std::string>(), s.at("score").get<double>()});
    }
    return spans;
  }
  return PredicateVerdict{j.at("holds").get<bool>(), j.at("score").get<double>()};
}

}  // namespace

CachingProvider::CachingProvider(ProviderPtr inner, std::optional<std::filesystem::path> cache_file)
    : inner_(std::move(inner)), file_(std::move(cache_file)) {
  if (!inner_) throw ConfigError("caching provider needs an inner provider");
  if (file_) load();
}

void CachingProvider::load() {
  std::ifstream in(*file_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      entries_.insert_or_assign(j.at("key").get<std::string>(), entry_from_json(j.at("result")));
    }
  } catch (const json::exception& e) {
    std::cerr << "warning: predicate cache " << file_->string() << " is corrupt at line " << line_no
              << " (" << e.what() << "); rebuilding from empty\n";
    entries_.clear();
    in.close();
    std::ofstream truncate(*file_, std::ios::binary | std::ios::trunc);
  }
}

std::string CachingProvider::key_for(std::string_view op, std::string_view text, const PredicateKind& kind,
                                     const QueryContext& context, std::size_t max_k) {
  json key = json::array({op, text});
  switch (kind.tag) {
    case PredicateKind::Tag::KeywordMatch:
      key.push_back("keyword");
      key.push_back(context.keywords);
      key.push_back(kind.threshold);
      break;
    case PredicateKind::Tag::HasAnswer:
      key.push_back("answer");
      key.push_back(context.question);
      break;
    case PredicateKind::Tag::HasEntity:
      key.push_back("entity");
      key.push_back(kind.label);
      break;
  }
  if (op == "spans") key.push_back(max_k);
  return fnv1a_hex(key.dump());
}

template <typename Compute>
CachingProvider::Entry CachingProvider::lookup(const std::string& key, Compute&& compute) const {
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  Entry fresh = compute();
  std::lock_guard lock(mutex_);
  ++misses_;
  const auto [it, inserted] = entries_.emplace(key, std::move(fresh));
  if (inserted && file_) {
    std::ofstream out(*file_, std::ios::binary | std::ios::app);
    out << json{{"key", key}, {"result", entry_to_json(it->second)}}.dump() << '\n';
  }
  return it->second;
}

PredicateVerdict CachingProvider::match_keyword(std::string_view text, std::span<const std::string> keywords,
                                                double threshold) const {
  QueryContext context;
  context.keywords.assign(keywords.begin(), keywords.end());
  const auto kind = PredicateKind::keyword(threshold);
  return std::get<PredicateVerdict>(lookup(key_for("verdict", text, kind, context, 0), [&]() -> Entry {
    return inner_->match_keyword(text, keywords, threshold);
  }));
}

PredicateVerdict CachingProvider::has_answer(std::string_view text, std::string_view question) const {
  QueryContext context;
  context.question = std::string(question);
  return std::get<PredicateVerdict>(lookup(key_for("verdict", text, PredicateKind::answer(), context, 0),
                                           [&]() -> Entry { return inner_->has_answer(text, question); }));
}

PredicateVerdict CachingProvider::has_entity(std::string_view text, std::string_view label) const {
  const auto kind = PredicateKind::entity(std::string(label));
  return std::get<PredicateVerdict>(lookup(key_for("verdict", text, kind, {}, 0),
                                           [&]() -> Entry { return inner_->has_entity(text, label); }));
}

std::vector<Span> CachingProvider::extract_spans(std::string_view text, const PredicateKind& kind,
                                                 const QueryContext& context, std::size_t max_k) const {
  return std::get<std::vector<Span>>(lookup(key_for("spans", text, kind, context, max_k), [&]() -> Entry {
    return inner_->extract_spans(text, kind, context, max_k);
  }));
}

std::size_t CachingProvider::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t CachingProvider::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t CachingProvider::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

ProviderPtr make_provider(const ProviderConfig& config) {
  ProviderPtr inner;
  if (config.mode == ProviderConfig::Mode::Remote) {
    if (config.endpoint.empty()) throw ConfigError("remote provider mode requires an endpoint");
    inner = std::make_shared<RemoteProvider>(config.endpoint);
  } else {
    Gazetteer gazetteer;
    for (const auto& path : config.gazetteers) gazetteer.merge(Gazetteer::load(path));
    inner = std::make_shared<BaselineProvider>(std::move(gazetteer), config.entity_labels);
  }
  return std::make_shared<CachingProvider>(std::move(inner), config.cache_path);
}

}  // namespace webqa
