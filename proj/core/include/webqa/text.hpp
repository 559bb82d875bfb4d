#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace webqa {

bool is_valid_utf8(std::string_view s);

// Collapses runs of Unicode whitespace to one ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view s);

// A maximal run of Unicode letters/digits inside some string.
struct Token {
  std::size_t start = 0;  // byte offset, inclusive
  std::size_t end = 0;    // byte offset, exclusive
  std::string folded;     // lowercase form
};

// Tokens in order of appearance, duplicates kept.
std::vector<Token> scan_tokens(std::string_view s);

// Sorted, duplicate-free set of lowercase tokens.
class TokenSet {
 public:
  TokenSet() = default;
  TokenSet(std::initializer_list<std::string> items);
  explicit TokenSet(std::vector<std::string> items);

  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
  [[nodiscard]] bool contains(std::string_view token) const;
  [[nodiscard]] const std::vector<std::string>& items() const noexcept { return items_; }
  [[nodiscard]] auto begin() const noexcept { return items_.begin(); }
  [[nodiscard]] auto end() const noexcept { return items_.end(); }

  [[nodiscard]] bool is_subset_of(const TokenSet& other) const;
  [[nodiscard]] std::size_t intersection_size(const TokenSet& other) const;
  [[nodiscard]] std::size_t symmetric_difference_size(const TokenSet& other) const;
  void merge(const TokenSet& other);

  friend bool operator==(const TokenSet&, const TokenSet&) = default;

 private:
  std::vector<std::string> items_;
};

TokenSet tokenize(std::string_view s);

// Tokens of every string in the range, pooled into one set.
template <typename Range>
TokenSet tokenize_all(const Range& strings) {
  TokenSet out;
  for (const auto& s : strings) out.merge(tokenize(s));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace webqa
