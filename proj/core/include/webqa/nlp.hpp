#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace webqa {

// One neural-predicate atom: keyword similarity above a threshold, question answerability,
// or presence of an entity of some label.
struct PredicateKind {
  enum class Tag { KeywordMatch, HasAnswer, HasEntity };

  Tag tag = Tag::KeywordMatch;
  double threshold = 0.0;  // KeywordMatch only
  std::string label;       // HasEntity only

  static PredicateKind keyword(double t) { return {Tag::KeywordMatch, t, {}}; }
  static PredicateKind answer() { return {Tag::HasAnswer, 0.0, {}}; }
  static PredicateKind entity(std::string l) { return {Tag::HasEntity, 0.0, std::move(l)}; }

  friend auto operator<=>(const PredicateKind&, const PredicateKind&) = default;
  friend bool operator==(const PredicateKind&, const PredicateKind&) = default;
};

std::string describe(const PredicateKind& kind);

inline const std::vector<std::string>& default_entity_labels() {
  static const std::vector<std::string> labels{"PERSON", "ORG", "DATE", "TIME", "LOC"};
  return labels;
}

// Question and keywords that predicates are evaluated against.
struct QueryContext {
  std::string question;
  std::vector<std::string> keywords;
};

struct PredicateVerdict {
  bool holds = false;
  double score = 0.0;

  friend bool operator==(const PredicateVerdict&, const PredicateVerdict&) = default;
};

struct Span {
  std::size_t start = 0;  // byte offsets into the queried string
  std::size_t end = 0;
  std::string text;
  double score = 0.0;

  friend bool operator==(const Span&, const Span&) = default;
};

// Picks up to max_k non-overlapping spans, best score first, earlier start on ties.
std::vector<Span> rank_spans(std::vector<Span> candidates, std::size_t max_k);

// Implementations must be safe for concurrent calls.
class PredicateProvider {
 public:
  virtual ~PredicateProvider() = default;

  virtual PredicateVerdict match_keyword(std::string_view text, std::span<const std::string> keywords,
                                         double threshold) const = 0;
  virtual PredicateVerdict has_answer(std::string_view text, std::string_view question) const = 0;
  virtual PredicateVerdict has_entity(std::string_view text, std::string_view label) const = 0;
  virtual std::vector<Span> extract_spans(std::string_view text, const PredicateKind& kind,
                                          const QueryContext& context, std::size_t max_k) const = 0;

  PredicateVerdict evaluate(std::string_view text, const PredicateKind& kind,
                            const QueryContext& context) const;
};

using ProviderPtr = std::shared_ptr<const PredicateProvider>;

// Label -> token sequences (lowercase) of known names.
class Gazetteer {
 public:
  // File format: one "LABEL<TAB>entry" per line; blank lines and '#' comments ignored.
  static Gazetteer load(const std::filesystem::path& path);
  static Gazetteer parse(std::string_view contents);

  void add(const std::string& label, std::string_view entry);
  void merge(const Gazetteer& other);
  [[nodiscard]] const std::vector<std::vector<std::string>>& entries(const std::string& label) const;
  [[nodiscard]] std::vector<std::string> labels() const;

 private:
  std::map<std::string, std::vector<std::vector<std::string>>> entries_;
};

// Deterministic rule-based predicates.
class BaselineProvider final : public PredicateProvider {
 public:
  explicit BaselineProvider(Gazetteer gazetteer = {},
                            std::vector<std::string> labels = default_entity_labels());

  PredicateVerdict match_keyword(std::string_view text, std::span<const std::string> keywords,
                                 double threshold) const override;
  PredicateVerdict has_answer(std::string_view text, std::string_view question) const override;
  PredicateVerdict has_entity(std::string_view text, std::string_view label) const override;
  std::vector<Span> extract_spans(std::string_view text, const PredicateKind& kind,
                                  const QueryContext& context, std::size_t max_k) const override;

  // Every entity mention of `label` in `text`, unranked. Throws ConfigError for unknown labels.
  std::vector<Span> entity_mentions(std::string_view text, std::string_view label) const;

  static constexpr double kAnswerThreshold = 0.5;

 private:
  Gazetteer gazetteer_;
  std::vector<std::string> labels_;
};

// Client for a model server speaking the JSON predicate protocol over HTTP.
class RemoteProvider final : public PredicateProvider {
 public:
  // endpoint: "http://host:port" with an optional path prefix.
  explicit RemoteProvider(std::string endpoint, double timeout_seconds = 30.0);

  PredicateVerdict match_keyword(std::string_view text, std::span<const std::string> keywords,
                                 double threshold) const override;
  PredicateVerdict has_answer(std::string_view text, std::string_view question) const override;
  PredicateVerdict has_entity(std::string_view text, std::string_view label) const override;
  std::vector<Span> extract_spans(std::string_view text, const PredicateKind& kind,
                                  const QueryContext& context, std::size_t max_k) const override;

 private:
  struct Reply {
    PredicateVerdict verdict;
    std::vector<Span> spans;
  };
  Reply call(std::string_view text, const PredicateKind& kind, const QueryContext& context) const;

  std::string host_;
  int port_ = 80;
  std::string path_;
  double timeout_seconds_;
};

// Memoizes another provider, optionally persisting results as JSON lines.
class CachingProvider final : public PredicateProvider {
 public:
  explicit CachingProvider(ProviderPtr inner, std::optional<std::filesystem::path> cache_file = {});

  PredicateVerdict match_keyword(std::string_view text, std::span<const std::string> keywords,
                                 double threshold) const override;
  PredicateVerdict has_answer(std::string_view text, std::string_view question) const override;
  PredicateVerdict has_entity(std::string_view text, std::string_view label) const override;
  std::vector<Span> extract_spans(std::string_view text, const PredicateKind& kind,
                                  const QueryContext& context, std::size_t max_k) const override;

  [[nodiscard]] std::size_t hits() const;
  [[nodiscard]] std::size_t misses() const;
  [[nodiscard]] std::size_t size() const;

  // Stable 64-bit key (hex) for a query; exposed for tests.
  static std::string key_for(std::string_view op, std::string_view text, const PredicateKind& kind,
                             const QueryContext& context, std::size_t max_k);

 private:
  using Entry = std::variant<PredicateVerdict, std::vector<Span>>;
  template <typename Compute>
  Entry lookup(const std::string& key, Compute&& compute) const;
  void load();

  ProviderPtr inner_;
  std::optional<std::filesystem::path> file_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, Entry> entries_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

struct ProviderConfig {
  enum class Mode { Baseline, Remote };
  Mode mode = Mode::Baseline;
  std::string endpoint;
  std::optional<std::filesystem::path> cache_path;
  std::vector<std::string> entity_labels = default_entity_labels();
  std::vector<std::filesystem::path> gazetteers;
};

// Builds the configured provider wrapped in a cache. Throws ConfigError on inconsistent settings.
ProviderPtr make_provider(const ProviderConfig& config);

}  // namespace webqa
