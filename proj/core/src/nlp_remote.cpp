#include "httplib.h"
#include "json.hpp"
#include "webqa/errors.hpp"
#include "webqa/nlp.hpp"

namespace webqa {
namespace {

using nlohmann::json;

std::string_view wire_kind(PredicateKind::Tag tag) {
  switch (tag) {
    case PredicateKind::Tag::KeywordMatch:
      return "keyword";
    case PredicateKind::Tag::HasAnswer:
      return "answer";
    case PredicateKind::Tag::HasEntity:
      return "entity";
  }
  return "keyword";
}

}  // namespace

RemoteProvider::RemoteProvider(std::string endpoint, double timeout_seconds) : timeout_seconds_(timeout_seconds) {
  constexpr std::string_view scheme = "http://";
  if (endpoint.rfind(scheme, 0) != 0) {
    throw ConfigError("remote endpoint must start with http:// (got '" + endpoint + "')");
  }
  std::string rest = endpoint.substr(scheme.size());
  const std::size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    path_ = rest.substr(slash);
    rest.resize(slash);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
  }
  const std::size_t colon = rest.rfind(':');
  host_ = rest.substr(0, colon);
  if (colon != std::string::npos) {
    try {
      port_ = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad port in remote endpoint '" + endpoint + "'");
    }
  }
  if (host_.empty()) throw ConfigError("remote endpoint has no host");
  path_ += "/v1/predicate";
}

RemoteProvider::Reply RemoteProvider::call(std::string_view text, const PredicateKind& kind,
                                           const QueryContext& context) const {
  json request{{"kind", wire_kind(kind.tag)}, {"text", text}};
  switch (kind.tag) {
    case PredicateKind::Tag::KeywordMatch:
      request["keywords"] = context.keywords;
      request["threshold"] = kind.threshold;
      break;
    case PredicateKind::Tag::HasAnswer:
      request["question"] = context.question;
      break;
    case PredicateKind::Tag::HasEntity:
      request["label"] = kind.label;
      break;
  }
  httplib::Client client(host_, port_);
  const auto seconds = static_cast<time_t>(timeout_seconds_);
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);
  const auto result = client.Post(path_, request.dump(), "application/json");
  if (!result) throw ProviderError("predicate request failed: " + httplib::to_string(result.error()));
  if (result->status != 200) {
    throw ProviderError("predicate server answered HTTP " + std::to_string(result->status));
  }
  Reply reply;
  try {
    const json body = json::parse(result->body);
    reply.verdict.holds = body.at("holds").get<bool>();
    reply.verdict.score = body.at("score").get<double>();
    if (body.contains("spans") && !body["spans"].is_null()) {
      for (const auto& s : body["spans"]) {
        const auto start = s.at("start").get<std::size_t>();
        const auto end = s.at("end").get<std::size_t>();
        if (start >= end || end > text.size()) throw ProviderError("predicate server returned an out-of-range span");
        reply.spans.push_back(Span{start, end, std::string(text.substr(start, end - start)), s.at("score").get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("undecodable predicate response: ") + e.what());
  }
  return reply;
}

PredicateVerdict RemoteProvider::match_keyword(std::string_view text, std::span<const std::string> keywords,
                                               double threshold) const {
  QueryContext context;
  context.keywords.assign(keywords.begin(), keywords.end());
  return call(text, PredicateKind::keyword(threshold), context).verdict;
}

PredicateVerdict RemoteProvider::has_answer(std::string_view text, std::string_view question) const {
  QueryContext context;
  context.question = std::string(question);
  return call(text, PredicateKind::answer(), context).verdict;
}

PredicateVerdict RemoteProvider::has_entity(std::string_view text, std::string_view label) const {
  return call(text, PredicateKind::entity(std::string(label)), {}).verdict;
}

std::vector<Span> RemoteProvider::extract_spans(std::string_view text, const PredicateKind& kind,
                                                const QueryContext& context, std::size_t max_k) const {
  if (max_k == 0) throw ContractViolation("extract_spans needs max_k >= 1");
  return rank_spans(call(text, kind, context).spans, max_k);
}

}  // namespace webqa
