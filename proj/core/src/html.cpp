#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webqa/errors.hpp"
#include "webqa/webtree.hpp"

namespace webqa {
namespace {

constexpr std::array<std::string_view, 8> kSkipContent = {
    "script", "style", "noscript", "template", "head", "title", "svg", "iframe"};

constexpr std::array<std::string_view, 30> kBlockTags = {
    "p",      "div",     "section",    "article", "header", "footer",  "nav",     "aside",
    "main",   "blockquote", "pre",     "address", "figure", "figcaption", "form", "fieldset",
    "hr",     "br",      "dl",         "dt",      "dd",     "center",  "details", "summary",
    "body",   "html",    "caption",    "thead",   "tbody",  "tfoot"};

template <std::size_t N>
bool one_of(std::string_view name, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

int header_level(std::string_view name) {
  if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6') return name[1] - '0';
  return 0;
}

bool is_list_tag(std::string_view name) { return name == "ul" || name == "ol" || name == "menu"; }

void append_code_point(std::string& out, uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(cp));
  out.append(buf, static_cast<std::size_t>(len));
}

struct NamedEntity {
  std::string_view name;
  uint32_t code_point;
};

constexpr std::array<NamedEntity, 16> kEntities = {{{"amp", '&'},
                                                    {"lt", '<'},
                                                    {"gt", '>'},
                                                    {"quot", '"'},
                                                    {"apos", '\''},
                                                    {"nbsp", 0xA0},
                                                    {"ndash", 0x2013},
                                                    {"mdash", 0x2014},
                                                    {"hellip", 0x2026},
                                                    {"copy", 0xA9},
                                                    {"reg", 0xAE},
                                                    {"lsquo", 0x2018},
                                                    {"rsquo", 0x2019},
                                                    {"ldquo", 0x201C},
                                                    {"rdquo", 0x201D},
                                                    {"middot", 0xB7}}};

// Decodes one character reference starting at s[i] == '&'; advances i past it.
void decode_entity(std::string_view s, std::size_t& i, std::string& out) {
  const std::size_t semi = s.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10) {
    out.push_back('&');
    ++i;
    return;
  }
  const std::string_view body = s.substr(i + 1, semi - i - 1);
  if (!body.empty() && body[0] == '#') {
    uint32_t cp = 0;
    bool ok = body.size() > 1;
    const bool hex = ok && (body[1] == 'x' || body[1] == 'X');
    for (std::size_t k = hex ? 2 : 1; ok && k < body.size(); ++k) {
      const char c = body[k];
      uint32_t digit = 0;
      if (c >= '0' && c <= '9') {
        digit = static_cast<uint32_t>(c - '0');
      } else if (hex && std::isxdigit(static_cast<unsigned char>(c))) {
        digit = static_cast<uint32_t>(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
      } else {
        ok = false;
      }
      cp = cp * (hex ? 16 : 10) + digit;
      if (cp > 0x10FFFF) cp = 0x110000;
    }
    if (ok && body.size() > (hex ? 2u : 1u)) {
      append_code_point(out, cp);
      i = semi + 1;
      return;
    }
  } else {
    for (const auto& e : kEntities) {
      if (e.name == body) {
        append_code_point(out, e.code_point);
        i = semi + 1;
        return;
      }
    }
  }
  out.push_back('&');
  ++i;
}

enum class FrameKind { List, Item, Table, Row, Cell };

struct Frame {
  FrameKind kind;
  NodeId node = -1;
  std::string text;
  std::vector<std::string> cells;
};

class TreeBuilder {
 public:
  TreeBuilder() {
    nodes_.push_back(TreeNode{0, "", NodeType::None});
    headers_.push_back({0, 0});
  }

  void text(std::string_view chunk) {
    if (header_level_ > 0) {
      header_text_.append(chunk);
    } else {
      pending_.append(chunk);
    }
  }

  void open(std::string_view name) {
    if (const int level = header_level(name); level > 0) {
      if (inert()) return space();
      flush();
      header_level_ = level;
      header_text_.clear();
      return;
    }
    if (header_level_ > 0) return space();
    if (is_list_tag(name)) return open_list();
    if (name == "li") return open_item();
    if (name == "table") return open_table();
    if (name == "tr") return open_row();
    if (name == "td" || name == "th") return open_cell();
    if (one_of(name, kBlockTags)) block_break();
  }

  void close(std::string_view name) {
    if (const int level = header_level(name); level > 0) {
      if (header_level_ > 0) finish_header();
      else if (inert()) space();
      return;
    }
    if (header_level_ > 0) return space();
    if (is_list_tag(name)) return close_through(FrameKind::List, FrameKind::Cell);
    if (name == "li") return close_through(FrameKind::Item, FrameKind::List);
    if (name == "table") return close_through(FrameKind::Table, FrameKind::Cell);
    if (name == "tr") return close_through(FrameKind::Row, FrameKind::Table);
    if (name == "td" || name == "th") return close_through(FrameKind::Cell, FrameKind::Row);
    if (one_of(name, kBlockTags)) block_break();
  }

  Webpage finish(std::string source_uri) {
    if (header_level_ > 0) finish_header();
    while (!frames_.empty()) pop_frame();
    flush();
    return Webpage(std::move(nodes_), edges_, 0, std::move(source_uri));
  }

 private:
  // Inside a table cell every structural tag only contributes spacing.
  bool inert() const {
    return std::any_of(frames_.begin(), frames_.end(),
                       [](const Frame& f) { return f.kind == FrameKind::Cell; });
  }

  void space() {
    if (header_level_ > 0) {
      header_text_.push_back(' ');
    } else {
      pending_.push_back(' ');
    }
  }

  NodeId add_node(NodeId parent, NodeType type, std::string text = {}) {
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(TreeNode{id, std::move(text), type});
    edges_.emplace_back(parent, id);
    return id;
  }

  NodeId section_parent() const { return headers_.back().second; }

  Frame* innermost(FrameKind kind) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      if (it->kind == kind) return &*it;
    }
    return nullptr;
  }

  // Moves pending inline text into the current block.
  void flush() {
    std::string content = collapse_whitespace(pending_);
    pending_.clear();
    if (content.empty()) return;
    if (frames_.empty()) {
      add_node(section_parent(), NodeType::None, std::move(content));
      return;
    }
    Frame& top = frames_.back();
    switch (top.kind) {
      case FrameKind::Item:
      case FrameKind::Cell:
      case FrameKind::Row:
        top.text += " " + content;
        break;
      case FrameKind::Table:
        nodes_[static_cast<std::size_t>(top.node)].text =
            collapse_whitespace(nodes_[static_cast<std::size_t>(top.node)].text + " " + content);
        break;
      case FrameKind::List:
        add_node(top.node, NodeType::None, std::move(content));
        break;
    }
  }

  void block_break() {
    if (!frames_.empty() && frames_.back().kind != FrameKind::List &&
        frames_.back().kind != FrameKind::Table) {
      space();
      return;
    }
    flush();
  }

  void finish_header() {
    std::string title = collapse_whitespace(header_text_);
    const int level = header_level_;
    header_level_ = 0;
    header_text_.clear();
    if (level == 1 && !root_claimed_ && !seen_header_) {
      // The first top-level header names the page itself.
      nodes_[0].text = std::move(title);
      root_claimed_ = true;
      seen_header_ = true;
      return;
    }
    seen_header_ = true;
    while (headers_.size() > 1 && headers_.back().first >= level) headers_.pop_back();
    const NodeId id = add_node(section_parent(), NodeType::None, std::move(title));
    headers_.emplace_back(level, id);
  }

  void open_list() {
    if (inert()) return space();
    flush();
    if (!frames_.empty() && frames_.back().kind == FrameKind::Item) {
      // A list nested in an item turns that item into a list node.
      Frame& item = frames_.back();
      nodes_[static_cast<std::size_t>(item.node)].type = NodeType::List;
      frames_.push_back(Frame{FrameKind::List, item.node, {}, {}});
      return;
    }
    const NodeId parent = frames_.empty() ? section_parent() : container_for_new_block();
    frames_.push_back(Frame{FrameKind::List, add_node(parent, NodeType::List), {}, {}});
  }

  // Parent for a list or table that opens inside a non-cell frame.
  NodeId container_for_new_block() {
    const Frame& top = frames_.back();
    if (top.kind == FrameKind::List || top.kind == FrameKind::Table) return top.node;
    return top.node;
  }

  void open_item() {
    if (inert()) return space();
    if (!frames_.empty() && frames_.back().kind == FrameKind::Item) pop_frame();
    if (frames_.empty() || frames_.back().kind != FrameKind::List) {
      block_break();
      return;
    }
    flush();
    const NodeId id = add_node(frames_.back().node, NodeType::None);
    frames_.push_back(Frame{FrameKind::Item, id, {}, {}});
  }

  void open_table() {
    if (inert()) return space();
    flush();
    const NodeId parent = frames_.empty() ? section_parent() : container_for_new_block();
    frames_.push_back(Frame{FrameKind::Table, add_node(parent, NodeType::Table), {}, {}});
  }

  void open_row() {
    if (inert() && !innermost(FrameKind::Table)) return space();
    // An unclosed cell or row ends here.
    while (!frames_.empty() &&
           (frames_.back().kind == FrameKind::Cell || frames_.back().kind == FrameKind::Row)) {
      pop_frame();
    }
    if (frames_.empty() || frames_.back().kind != FrameKind::Table) {
      block_break();
      return;
    }
    flush();
    const NodeId id = add_node(frames_.back().node, NodeType::None);
    frames_.push_back(Frame{FrameKind::Row, id, {}, {}});
  }

  void open_cell() {
    if (!frames_.empty() && frames_.back().kind == FrameKind::Cell) pop_frame();
    if (frames_.empty() || frames_.back().kind != FrameKind::Row) {
      if (!frames_.empty() && frames_.back().kind == FrameKind::Table) {
        open_row();
      } else {
        return space();
      }
    }
    flush();
    frames_.push_back(Frame{FrameKind::Cell, -1, {}, {}});
  }

  // Pops frames up to and including the innermost `kind`, but never past a `barrier` frame.
  void close_through(FrameKind kind, FrameKind barrier) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      if (it->kind == kind) {
        const auto depth = static_cast<std::size_t>(frames_.rend() - it);
        while (frames_.size() >= depth) pop_frame();
        return;
      }
      if (it->kind == barrier) break;
    }
    space();
  }

  void pop_frame() {
    flush();
    Frame frame = std::move(frames_.back());
    frames_.pop_back();
    switch (frame.kind) {
      case FrameKind::Item:
        nodes_[static_cast<std::size_t>(frame.node)].text = collapse_whitespace(frame.text);
        break;
      case FrameKind::Cell: {
        std::string cell = collapse_whitespace(frame.text);
        if (!cell.empty() && !frames_.empty() && frames_.back().kind == FrameKind::Row) {
          frames_.back().cells.push_back(std::move(cell));
        }
        break;
      }
      case FrameKind::Row: {
        std::vector<std::string> cells = std::move(frame.cells);
        if (std::string loose = collapse_whitespace(frame.text); !loose.empty()) {
          cells.push_back(std::move(loose));
        }
        nodes_[static_cast<std::size_t>(frame.node)].text = join(cells, " | ");
        break;
      }
      case FrameKind::List:
      case FrameKind::Table:
        break;
    }
  }

  std::vector<TreeNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::pair<int, NodeId>> headers_;  // (level, node); entry 0 is the root
  std::vector<Frame> frames_;
  std::string pending_;
  std::string header_text_;
  int header_level_ = 0;
  bool root_claimed_ = false;
  bool seen_header_ = false;
};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_ci(std::string_view s, std::size_t at, std::string_view prefix) {
  if (s.size() - at < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[at + k])) != prefix[k]) return false;
  }
  return true;
}

// Skips to just past the '>' that ends a tag, honoring quoted attribute values.
std::size_t skip_tag(std::string_view s, std::size_t i, bool& self_closing) {
  char quote = 0;
  self_closing = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      self_closing = i > 0 && s[i - 1] == '/';
      return i + 1;
    }
  }
  return s.size();
}

}  // namespace

Webpage parse_html(std::string_view html, std::string source_uri) {
  if (!is_valid_utf8(html)) throw DecodeError("document is not valid UTF-8");
  TreeBuilder builder;
  std::string text;
  std::size_t i = 0;
  auto emit_text = [&] {
    if (!text.empty()) builder.text(text);
    text.clear();
  };
  while (i < html.size()) {
    const char c = html[i];
    if (c == '&') {
      decode_entity(html, i, text);
      continue;
    }
    if (c != '<' || i + 1 >= html.size()) {
      text.push_back(c);
      ++i;
      continue;
    }
    const char next = html[i + 1];
    if (html.compare(i, 4, "<!--") == 0) {
      emit_text();
      const std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (next == '!' || next == '?') {
      emit_text();
      bool ignored = false;
      i = skip_tag(html, i + 2, ignored);
      continue;
    }
    const bool closing = next == '/';
    const std::size_t name_start = i + (closing ? 2 : 1);
    std::size_t name_end = name_start;
    while (name_end < html.size() && std::isalnum(static_cast<unsigned char>(html[name_end]))) ++name_end;
    if (name_end == name_start || !std::isalpha(static_cast<unsigned char>(html[name_start]))) {
      text.push_back(c);
      ++i;
      continue;
    }
    emit_text();
    const std::string name = lower_ascii(html.substr(name_start, name_end - name_start));
    bool self_closing = false;
    i = skip_tag(html, name_end, self_closing);
    if (closing) {
      builder.close(name);
      continue;
    }
    if (one_of(name, kSkipContent)) {
      if (self_closing) continue;
      // Drop everything up to the matching end tag.
      const std::string end_tag = "</" + name;
      std::size_t j = i;
      while (j < html.size() && !starts_with_ci(html, j, end_tag)) ++j;
      bool ignored = false;
      i = j < html.size() ? skip_tag(html, j, ignored) : html.size();
      continue;
    }
    if (name == "img") continue;
    builder.open(name);
    if (self_closing) builder.close(name);
  }
  emit_text();
  return builder.finish(std::move(source_uri));
}

}  // namespace webqa
