#include "webqa/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <iterator>

namespace webqa {
namespace {

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(buf, static_cast<std::size_t>(len));
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

}  // namespace

bool is_valid_utf8(std::string_view s) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  bool pending_space = false;
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(s.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(i - begin)));
  }
  return out;
}

std::vector<Token> scan_tokens(std::string_view s) {
  std::vector<Token> tokens;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  Token current;
  bool in_token = false;
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && u_isalnum(c)) {
      if (!in_token) {
        current = Token{static_cast<std::size_t>(begin), 0, {}};
        in_token = true;
      }
      append_utf8(current.folded, u_tolower(c));
      current.end = static_cast<std::size_t>(i);
    } else if (in_token) {
      tokens.push_back(std::move(current));
      in_token = false;
    }
  }
  if (in_token) tokens.push_back(std::move(current));
  return tokens;
}

TokenSet::TokenSet(std::initializer_list<std::string> items) : TokenSet(std::vector<std::string>(items)) {}

TokenSet::TokenSet(std::vector<std::string> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool TokenSet::contains(std::string_view token) const {
  return std::binary_search(items_.begin(), items_.end(), token);
}

bool TokenSet::is_subset_of(const TokenSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

std::size_t TokenSet::intersection_size(const TokenSet& other) const {
  std::size_t n = 0;
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

std::size_t TokenSet::symmetric_difference_size(const TokenSet& other) const {
  return size() + other.size() - 2 * intersection_size(other);
}

void TokenSet::merge(const TokenSet& other) {
  if (other.empty()) return;
  std::vector<std::string> merged;
  merged.reserve(items_.size() + other.items_.size());
  std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                 std::back_inserter(merged));
  items_ = std::move(merged);
}

TokenSet tokenize(std::string_view s) {
  std::vector<std::string> words;
  for (auto& t : scan_tokens(s)) words.push_back(std::move(t.folded));
  return TokenSet(std::move(words));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace webqa
