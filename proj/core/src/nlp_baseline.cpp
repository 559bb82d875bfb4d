#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "webqa/errors.hpp"
#include "webqa/nlp.hpp"
#include "webqa/text.hpp"

namespace webqa {
namespace {

constexpr std::array<std::string_view, 72> kStopwords = {
    "a",     "an",    "the",   "and",   "or",    "of",    "to",    "in",    "on",    "at",
    "for",   "with",  "by",    "from",  "as",    "is",    "are",   "was",   "were",  "be",
    "been",  "being", "has",   "have",  "had",   "do",    "does",  "did",   "this",  "that",
    "these", "those", "it",    "its",   "which", "what",  "who",   "whom",  "whose", "where",
    "when",  "why",   "how",   "i",     "you",   "he",    "she",   "we",    "they",  "me",
    "him",   "her",   "us",    "them",  "my",    "your",  "his",   "our",   "their", "not",
    "no",    "can",   "could", "would", "should", "will", "may",   "than",  "then",  "there",
    "so",    "any"};

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

std::vector<std::string> folded_words(std::string_view s) {
  std::vector<std::string> words;
  for (auto& t : scan_tokens(s)) words.push_back(std::move(t.folded));
  return words;
}

// Start positions of `needle` as a contiguous run inside `hay`.
std::vector<std::size_t> occurrences(const std::vector<std::string>& hay,
                                     const std::vector<std::string>& needle) {
  std::vector<std::size_t> out;
  if (needle.empty() || needle.size() > hay.size()) return out;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.push_back(i);
    }
  }
  return out;
}

struct CaseProfile {
  std::size_t code_points = 0;
  std::size_t upper = 0;
  std::size_t lower = 0;
  std::size_t letters = 0;
  bool first_upper = false;
};

CaseProfile case_profile(std::string_view s) {
  CaseProfile p;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) continue;
    const bool up = u_isupper(c) != 0;
    if (p.code_points == 0) p.first_upper = up;
    ++p.code_points;
    if (u_isalpha(c)) ++p.letters;
    if (up) ++p.upper;
    if (u_islower(c)) ++p.lower;
  }
  return p;
}

bool is_all_caps_word(std::string_view s) {
  const auto p = case_profile(s);
  return p.code_points >= 2 && p.upper == p.code_points;
}

bool is_capitalized_word(std::string_view s) {
  const auto p = case_profile(s);
  return p.code_points >= 2 && p.letters == p.code_points && p.first_upper &&
         p.lower == p.code_points - 1;
}

bool all_digits(std::string_view s, std::size_t min_len, std::size_t max_len) {
  if (s.size() < min_len || s.size() > max_len) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

const std::regex& year_pattern() {
  static const std::regex re("^(19|20)[0-9]{2}$");
  return re;
}

const std::regex& month_pattern() {
  static const std::regex re(
      "^(jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|june?|july?|aug(ust)?|sep(t|tember)?|"
      "oct(ober)?|nov(ember)?|dec(ember)?)$");
  return re;
}

const std::regex& clock_pattern() {
  static const std::regex re("^[0-9]{1,2}:[0-5][0-9]$");
  return re;
}

const std::regex& meridiem_pattern() {
  static const std::regex re("^(am|pm)$");
  return re;
}

Span make_span(std::string_view text, std::size_t start, std::size_t end, double score) {
  return Span{start, end, std::string(text.substr(start, end - start)), score};
}

// Text strictly between two adjacent tokens.
std::string_view gap(std::string_view text, const std::vector<Token>& tokens, std::size_t i) {
  return text.substr(tokens[i].end, tokens[i + 1].start - tokens[i].end);
}

// True when token i is followed by an apostrophe and a two- or four-digit year, as in PLDI'19.
bool has_year_suffix(std::string_view text, const std::vector<Token>& tokens, std::size_t i) {
  if (i + 1 >= tokens.size()) return false;
  const std::string_view sep = gap(text, tokens, i);
  const std::string_view next = tokens[i + 1].folded;
  return (sep == "'" || sep == "\xE2\x80\x99") && (all_digits(next, 2, 2) || all_digits(next, 4, 4));
}

void gazetteer_mentions(std::string_view text, const std::vector<Token>& tokens,
                        const std::vector<std::vector<std::string>>& entries, std::vector<Span>& out) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(t.folded);
  for (const auto& entry : entries) {
    for (std::size_t at : occurrences(words, entry)) {
      std::size_t last = at + entry.size() - 1;
      if (has_year_suffix(text, tokens, last)) ++last;
      out.push_back(make_span(text, tokens[at].start, tokens[last].end, 1.0));
    }
  }
}

void org_mentions(std::string_view text, const std::vector<Token>& tokens, std::vector<Span>& out) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string_view word = text.substr(tokens[i].start, tokens[i].end - tokens[i].start);
    if (!is_all_caps_word(word)) continue;
    // Venue-style suffix such as PLDI'19 or ICSE'2020.
    if (has_year_suffix(text, tokens, i)) {
      out.push_back(make_span(text, tokens[i].start, tokens[i + 1].end, 0.9));
      ++i;
      continue;
    }
    out.push_back(make_span(text, tokens[i].start, tokens[i].end, 0.6));
  }
}

void person_mentions(std::string_view text, const std::vector<Token>& tokens, std::vector<Span>& out) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto capitalized = [&](std::size_t k) {
      return is_capitalized_word(text.substr(tokens[k].start, tokens[k].end - tokens[k].start));
    };
    if (!capitalized(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && capitalized(j + 1) && gap(text, tokens, j) == " ") ++j;
    if (j > i) out.push_back(make_span(text, tokens[i].start, tokens[j].end, 0.8));
    i = j + 1;
  }
}

void date_mentions(std::string_view text, const std::vector<Token>& tokens, std::vector<Span>& out) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (std::regex_match(tokens[i].folded, month_pattern())) {
      std::size_t j = i;
      auto spaced = [&](std::size_t k) {
        const auto g = gap(text, tokens, k);
        return g == " " || g == ". " || g == ", ";
      };
      if (j + 1 < tokens.size() && spaced(j) && all_digits(tokens[j + 1].folded, 1, 2)) ++j;
      if (j + 1 < tokens.size() && spaced(j) && std::regex_match(tokens[j + 1].folded, year_pattern())) ++j;
      out.push_back(make_span(text, tokens[i].start, tokens[j].end, 0.9));
      i = j + 1;
      continue;
    }
    if (std::regex_match(tokens[i].folded, year_pattern())) {
      out.push_back(make_span(text, tokens[i].start, tokens[i].end, 0.8));
    }
    ++i;
  }
}

void time_mentions(std::string_view text, const std::vector<Token>& tokens, std::vector<Span>& out) {
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string clock = tokens[i].folded + ":" + tokens[i + 1].folded;
    if (gap(text, tokens, i) != ":" || !std::regex_match(clock, clock_pattern())) continue;
    std::size_t j = i + 1;
    if (j + 1 < tokens.size() && gap(text, tokens, j) == " " &&
        std::regex_match(tokens[j + 1].folded, meridiem_pattern())) {
      ++j;
    }
    out.push_back(make_span(text, tokens[i].start, tokens[j].end, 0.9));
    i = j;
  }
}

double overlap_ratio(const TokenSet& content, const TokenSet& text_tokens) {
  if (content.empty()) return 0.0;
  return static_cast<double>(content.intersection_size(text_tokens)) / static_cast<double>(content.size());
}

TokenSet content_words(std::string_view question) {
  std::vector<std::string> words;
  for (auto& w : folded_words(question)) {
    if (!is_stopword(w)) words.push_back(std::move(w));
  }
  return TokenSet(std::move(words));
}

bool is_sentence_break(char c) { return c == '.' || c == '!' || c == '?' || c == ';' || c == '\n'; }

}  // namespace

std::string describe(const PredicateKind& kind) {
  switch (kind.tag) {
    case PredicateKind::Tag::KeywordMatch: {
      std::ostringstream os;
      os << "matchKeyword(" << kind.threshold << ")";
      return os.str();
    }
    case PredicateKind::Tag::HasAnswer:
      return "hasAnswer";
    case PredicateKind::Tag::HasEntity:
      return "hasEntity(" + kind.label + ")";
  }
  return "?";
}

std::vector<Span> rank_spans(std::vector<Span> candidates, std::size_t max_k) {
  std::sort(candidates.begin(), candidates.end(), [](const Span& a, const Span& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<Span> chosen;
  for (auto& s : candidates) {
    if (chosen.size() >= max_k) break;
    const bool overlaps = std::any_of(chosen.begin(), chosen.end(), [&](const Span& c) {
      return s.start < c.end && c.start < s.end;
    });
    if (!overlaps) chosen.push_back(std::move(s));
  }
  return chosen;
}

PredicateVerdict PredicateProvider::evaluate(std::string_view text, const PredicateKind& kind,
                                             const QueryContext& context) const {
  switch (kind.tag) {
    case PredicateKind::Tag::KeywordMatch:
      return match_keyword(text, context.keywords, kind.threshold);
    case PredicateKind::Tag::HasAnswer:
      return has_answer(text, context.question);
    case PredicateKind::Tag::HasEntity:
      return has_entity(text, kind.label);
  }
  return {};
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read gazetteer " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

Gazetteer Gazetteer::parse(std::string_view contents) {
  Gazetteer g;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    std::string_view line = contents.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ConfigError("gazetteer line without a tab: " + std::string(line));
    g.add(std::string(line.substr(0, tab)), line.substr(tab + 1));
  }
  return g;
}

void Gazetteer::add(const std::string& label, std::string_view entry) {
  auto words = folded_words(entry);
  if (words.empty()) return;
  auto& list = entries_[label];
  if (std::find(list.begin(), list.end(), words) == list.end()) list.push_back(std::move(words));
}

void Gazetteer::merge(const Gazetteer& other) {
  for (const auto& [label, list] : other.entries_) {
    for (const auto& words : list) {
      auto& mine = entries_[label];
      if (std::find(mine.begin(), mine.end(), words) == mine.end()) mine.push_back(words);
    }
  }
}

const std::vector<std::vector<std::string>>& Gazetteer::entries(const std::string& label) const {
  static const std::vector<std::vector<std::string>> none;
  const auto it = entries_.find(label);
  return it == entries_.end() ? none : it->second;
}

std::vector<std::string> Gazetteer::labels() const {
  std::vector<std::string> out;
  for (const auto& [label, list] : entries_) out.push_back(label);
  return out;
}

BaselineProvider::BaselineProvider(Gazetteer gazetteer, std::vector<std::string> labels)
    : gazetteer_(std::move(gazetteer)), labels_(std::move(labels)) {
  const auto& builtin = default_entity_labels();
  const auto listed = gazetteer_.labels();
  for (const auto& label : labels_) {
    if (std::find(builtin.begin(), builtin.end(), label) == builtin.end() &&
        std::find(listed.begin(), listed.end(), label) == listed.end()) {
      throw ConfigError("entity label '" + label + "' has neither a built-in rule nor gazetteer entries");
    }
  }
}

PredicateVerdict BaselineProvider::match_keyword(std::string_view text, std::span<const std::string> keywords,
                                                 double threshold) const {
  if (keywords.empty()) throw ContractViolation("matchKeyword needs at least one keyword");
  const auto words = folded_words(text);
  const TokenSet text_tokens(words);
  double best = 0.0;
  for (const auto& k : keywords) {
    const auto key_words = folded_words(k);
    if (key_words.empty()) continue;
    double sim = 0.0;
    if (!occurrences(words, key_words).empty()) {
      sim = 1.0;
    } else {
      const TokenSet key_tokens(key_words);
      const std::size_t common = text_tokens.intersection_size(key_tokens);
      const std::size_t uni = text_tokens.size() + key_tokens.size() - common;
      sim = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
    }
    best = std::max(best, sim);
  }
  return {best >= threshold, best};
}

PredicateVerdict BaselineProvider::has_answer(std::string_view text, std::string_view question) const {
  if (question.empty()) throw ContractViolation("hasAnswer needs a question");
  const double ratio = overlap_ratio(content_words(question), tokenize(text));
  return {ratio >= kAnswerThreshold, ratio};
}

std::vector<Span> BaselineProvider::entity_mentions(std::string_view text, std::string_view label) const {
  const std::string name(label);
  if (std::find(labels_.begin(), labels_.end(), name) == labels_.end()) {
    throw ConfigError("entity label '" + name + "' is not in the configured vocabulary");
  }
  const auto tokens = scan_tokens(text);
  std::vector<Span> out;
  gazetteer_mentions(text, tokens, gazetteer_.entries(name), out);
  if (name == "ORG") org_mentions(text, tokens, out);
  if (name == "PERSON") person_mentions(text, tokens, out);
  if (name == "DATE") date_mentions(text, tokens, out);
  if (name == "TIME") time_mentions(text, tokens, out);
  return out;
}

PredicateVerdict BaselineProvider::has_entity(std::string_view text, std::string_view label) const {
  const auto mentions = entity_mentions(text, label);
  double best = 0.0;
  for (const auto& m : mentions) best = std::max(best, m.score);
  return {!mentions.empty(), best};
}

std::vector<Span> BaselineProvider::extract_spans(std::string_view text, const PredicateKind& kind,
                                                  const QueryContext& context, std::size_t max_k) const {
  if (max_k == 0) throw ContractViolation("extract_spans needs max_k >= 1");
  std::vector<Span> candidates;
  switch (kind.tag) {
    case PredicateKind::Tag::HasEntity:
      candidates = entity_mentions(text, kind.label);
      break;
    case PredicateKind::Tag::KeywordMatch: {
      if (context.keywords.empty()) throw ContractViolation("matchKeyword needs at least one keyword");
      const auto tokens = scan_tokens(text);
      std::vector<std::string> words;
      for (const auto& t : tokens) words.push_back(t.folded);
      for (const auto& k : context.keywords) {
        const auto key_words = folded_words(k);
        for (std::size_t at : occurrences(words, key_words)) {
          candidates.push_back(make_span(text, tokens[at].start, tokens[at + key_words.size() - 1].end, 1.0));
        }
      }
      std::erase_if(candidates, [&](const Span& s) { return s.score < kind.threshold; });
      break;
    }
    case PredicateKind::Tag::HasAnswer: {
      if (context.question.empty()) throw ContractViolation("hasAnswer needs a question");
      const TokenSet content = content_words(context.question);
      std::optional<Span> best;
      std::size_t begin = 0;
      for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && !is_sentence_break(text[i])) continue;
        const auto tokens = scan_tokens(text.substr(begin, i - begin));
        if (!tokens.empty()) {
          const std::size_t s = begin + tokens.front().start;
          const std::size_t e = begin + tokens.back().end;
          const double ratio = overlap_ratio(content, tokenize(text.substr(s, e - s)));
          if (ratio >= kAnswerThreshold && (!best || ratio > best->score)) best = make_span(text, s, e, ratio);
        }
        begin = i + 1;
      }
      if (best) candidates.push_back(std::move(*best));
      break;
    }
  }
  return rank_spans(std::move(candidates), max_k);
}

}  // namespace webqa
