#include "maestro/yaml_lite.hpp"

#include <cstddef>

namespace maestro::yaml {

namespace {

constexpr int kMaxDepth = 64;

struct Line {
  int number = 0;
  int indent = 0;    // zero-based column of the first content character
  std::string text;  // content without indentation, comments or trailing blanks
};

bool is_blank(char c) { return c == ' ' || c == '\t'; }

/// Strips a trailing comment: `#` at the start or after a blank, outside quotes.
std::string strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote != 0) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      // Quotes only open a quoted scalar at token start; `it's` stays plain.
      if (i == 0 || is_blank(s[i - 1]) || s[i - 1] == ':' || s[i - 1] == '{' ||
          s[i - 1] == '[' || s[i - 1] == ',' || s[i - 1] == '-') {
        quote = c;
      }
    } else if (c == '#' && (i == 0 || is_blank(s[i - 1]))) {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

std::string rtrim(std::string s) {
  while (!s.empty() && (is_blank(s.back()) || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

class Reader {
public:
  explicit Reader(std::string_view text) { split(text); }

  Node document() {
    if (lines_.empty()) {
      return Node{};
    }
    Node root = block(0, 0);
    if (pos_ < lines_.size()) {
      fail("unexpected content (inconsistent indentation?)", lines_[pos_].number, lines_[pos_].indent);
    }
    return root;
  }

private:
  [[noreturn]] static void fail(const std::string& msg, int line, int zero_col) {
    throw Error(msg, Mark{line, zero_col + 1});
  }

  void split(std::string_view text) {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) {
        end = text.size();
      }
      ++number;
      std::string_view raw = text.substr(start, end - start);
      start = end + 1;
      std::string content = rtrim(strip_comment(raw));
      std::size_t indent = 0;
      while (indent < content.size() && content[indent] == ' ') {
        ++indent;
      }
      if (indent < content.size() && content[indent] == '\t') {
        fail("tab characters are not allowed in indentation", number, static_cast<int>(indent));
      }
      if (indent == content.size()) {
        if (end == text.size()) break;
        continue;
      }
      std::string body = content.substr(indent);
      if (indent == 0 && (body == "---" || body == "...")) {
        if (end == text.size()) break;
        continue;
      }
      if (indent == 0 && body.rfind("--- ", 0) == 0) {
        body = body.substr(4);
        while (!body.empty() && body.front() == ' ') {
          body.erase(body.begin());
          ++indent;
        }
        indent += 4;
        if (body.empty()) continue;
      }
      lines_.push_back({number, static_cast<int>(indent), std::move(body)});
      if (end == text.size()) break;
    }
  }

  static bool is_seq_entry(const std::string& t) {
    return t == "-" || (t.size() >= 2 && t[0] == '-' && t[1] == ' ');
  }

  /// Position of the mapping colon (`: ` or a trailing `:`) outside quotes and brackets.
  static std::size_t find_key_colon(const std::string& t) {
    int depth = 0;
    char quote = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const char c = t[i];
      if (quote != 0) {
        if (c == '\\' && quote == '"') {
          ++i;
        } else if (c == quote) {
          quote = 0;
        }
        continue;
      }
      if ((c == '"' || c == '\'') && i == 0) {
        quote = c;
      } else if (c == '{' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ']') {
        --depth;
      } else if (c == ':' && depth == 0 && (i + 1 == t.size() || is_blank(t[i + 1]))) {
        return i;
      }
    }
    return std::string::npos;
  }

  Node block(std::size_t min_indent, int depth) {
    if (depth > kMaxDepth) {
      fail("nesting too deep", lines_[pos_].number, lines_[pos_].indent);
    }
    const Line& first = lines_[pos_];
    if (static_cast<std::size_t>(first.indent) < min_indent) {
      return Node{Node::Kind::Null, Mark{first.number, first.indent + 1}, {}, false, {}, {}, {}, {}};
    }
    if (is_seq_entry(first.text)) {
      return sequence(first.indent, depth);
    }
    if (find_key_colon(first.text) != std::string::npos) {
      return mapping(first.indent, depth);
    }
    Line line = first;
    ++pos_;
    return inline_value(line.text, 0, line.number, line.indent, depth);
  }

  Node sequence(int indent, int depth) {
    Node seq;
    seq.kind = Node::Kind::Seq;
    seq.mark = {lines_[pos_].number, indent + 1};
    while (pos_ < lines_.size() && lines_[pos_].indent == indent && is_seq_entry(lines_[pos_].text)) {
      Line& line = lines_[pos_];
      std::size_t off = 1;
      while (off < line.text.size() && line.text[off] == ' ') {
        ++off;
      }
      if (off >= line.text.size()) {
        ++pos_;
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          seq.items.push_back(block(static_cast<std::size_t>(indent) + 1, depth + 1));
        } else {
          seq.items.push_back(Node{Node::Kind::Null, Mark{line.number, indent + 1}, {}, false, {}, {}, {}, {}});
        }
        continue;
      }
      // Re-read the rest of the entry as a line of its own at its content column.
      line.indent += static_cast<int>(off);
      line.text = line.text.substr(off);
      seq.items.push_back(block(static_cast<std::size_t>(indent) + 1, depth + 1));
    }
    if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
      fail("unexpected indentation", lines_[pos_].number, lines_[pos_].indent);
    }
    return seq;
  }

  Node mapping(int indent, int depth) {
    Node map;
    map.kind = Node::Kind::Map;
    map.mark = {lines_[pos_].number, indent + 1};
    while (pos_ < lines_.size() && lines_[pos_].indent == indent && !is_seq_entry(lines_[pos_].text)) {
      const Line line = lines_[pos_];
      const std::size_t colon = find_key_colon(line.text);
      if (colon == std::string::npos) {
        fail("expected 'key: value'", line.number, line.indent);
      }
      std::string key = rtrim(line.text.substr(0, colon));
      if (key.size() >= 2 && (key.front() == '"' || key.front() == '\'') && key.back() == key.front()) {
        key = key.substr(1, key.size() - 2);
      }
      if (key.empty()) {
        fail("empty mapping key", line.number, line.indent);
      }
      for (const std::string& k : map.keys) {
        if (k == key) {
          fail("duplicate key '" + key + "'", line.number, line.indent);
        }
      }
      map.keys.push_back(key);
      map.key_marks.push_back({line.number, line.indent + 1});
      std::size_t vstart = colon + 1;
      while (vstart < line.text.size() && is_blank(line.text[vstart])) {
        ++vstart;
      }
      ++pos_;
      if (vstart >= line.text.size()) {
        if (pos_ < lines_.size() &&
            (lines_[pos_].indent > indent ||
             (lines_[pos_].indent == indent && is_seq_entry(lines_[pos_].text)))) {
          const std::size_t min = lines_[pos_].indent > indent ? static_cast<std::size_t>(indent) + 1
                                                               : static_cast<std::size_t>(indent);
          map.values.push_back(block(min, depth + 1));
        } else {
          map.values.push_back(Node{Node::Kind::Null, Mark{line.number, line.indent + static_cast<int>(colon) + 2},
                                    {}, false, {}, {}, {}, {}});
        }
      } else {
        map.values.push_back(inline_value(line.text, vstart, line.number, line.indent, depth + 1));
      }
    }
    if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
      fail("unexpected indentation", lines_[pos_].number, lines_[pos_].indent);
    }
    return map;
  }

  // ---- inline (single-line) values ----------------------------------------

  struct Cursor {
    const std::string& text;
    std::size_t i;
    int line;
    int base;  // zero-based column of text[0]

    [[nodiscard]] bool done() const { return i >= text.size(); }
    [[nodiscard]] char peek() const { return done() ? '\0' : text[i]; }
    void skip_blanks() {
      while (!done() && is_blank(text[i])) ++i;
    }
    [[nodiscard]] Mark mark() const { return {line, base + static_cast<int>(i) + 1}; }
    [[noreturn]] void fail(const std::string& msg) const { throw Error(msg, mark()); }
  };

  Node inline_value(const std::string& text, std::size_t start, int line, int base, int depth) {
    Cursor c{text, start, line, base};
    Node n = flow_value(c, depth, /*in_flow=*/false);
    c.skip_blanks();
    if (!c.done()) {
      c.fail("unexpected trailing characters");
    }
    return n;
  }

  Node flow_value(Cursor& c, int depth, bool in_flow) {
    if (depth > kMaxDepth) {
      c.fail("nesting too deep");
    }
    c.skip_blanks();
    const char ch = c.peek();
    if (ch == '"' || ch == '\'') {
      return quoted(c);
    }
    if (ch == '{') {
      return flow_map(c, depth);
    }
    if (ch == '[' && in_flow) {
      return flow_seq(c, depth);
    }
    if (ch == '[' && !in_flow && c.text.find(']', c.i) != std::string::npos && c.i + 1 < c.text.size()) {
      return flow_seq(c, depth);
    }
    return plain(c, in_flow);
  }

  Node quoted(Cursor& c) {
    const char q = c.peek();
    Node n;
    n.kind = Node::Kind::Scalar;
    n.quoted = true;
    ++c.i;
    n.mark = c.mark();
    for (;;) {
      if (c.done()) {
        c.fail("unterminated quoted string");
      }
      const char ch = c.text[c.i++];
      if (ch == q) {
        if (q == '\'' && c.peek() == '\'') {
          n.scalar.push_back('\'');
          ++c.i;
          continue;
        }
        break;
      }
      if (q == '"' && ch == '\\') {
        if (c.done()) {
          c.fail("unterminated escape");
        }
        const char e = c.text[c.i++];
        switch (e) {
          case 'n': n.scalar.push_back('\n'); break;
          case 't': n.scalar.push_back('\t'); break;
          case '\\': n.scalar.push_back('\\'); break;
          case '"': n.scalar.push_back('"'); break;
          case '/': n.scalar.push_back('/'); break;
          default: c.fail(std::string("unsupported escape '\\") + e + "'");
        }
        continue;
      }
      n.scalar.push_back(ch);
    }
    return n;
  }

  Node plain(Cursor& c, bool in_flow) {
    Node n;
    n.kind = Node::Kind::Scalar;
    n.mark = c.mark();
    int brackets = 0;
    const std::size_t begin = c.i;
    while (!c.done()) {
      const char ch = c.peek();
      if (in_flow && brackets == 0 && (ch == ',' || ch == '}' || ch == ']')) {
        break;
      }
      if (ch == '[') ++brackets;
      if (ch == ']') --brackets;
      ++c.i;
    }
    std::string s = c.text.substr(begin, c.i - begin);
    n.scalar = rtrim(std::move(s));
    if (n.scalar.empty()) {
      n.kind = Node::Kind::Null;
    }
    return n;
  }

  Node flow_map(Cursor& c, int depth) {
    Node n;
    n.kind = Node::Kind::Map;
    n.mark = c.mark();
    ++c.i;  // '{'
    c.skip_blanks();
    if (c.peek() == '}') {
      ++c.i;
      return n;
    }
    for (;;) {
      c.skip_blanks();
      const Mark km = c.mark();
      std::string key;
      if (c.peek() == '"' || c.peek() == '\'') {
        key = quoted(c).scalar;
        c.skip_blanks();
      } else {
        while (!c.done() && c.peek() != ':' && c.peek() != ',' && c.peek() != '}') {
          key.push_back(c.text[c.i++]);
        }
        key = rtrim(std::move(key));
      }
      if (key.empty()) {
        c.fail("empty key in flow mapping");
      }
      if (c.peek() != ':') {
        c.fail("expected ':' in flow mapping");
      }
      ++c.i;
      for (const std::string& k : n.keys) {
        if (k == key) {
          throw Error("duplicate key '" + key + "'", km);
        }
      }
      n.keys.push_back(key);
      n.key_marks.push_back(km);
      n.values.push_back(flow_value(c, depth + 1, true));
      c.skip_blanks();
      if (c.peek() == ',') {
        ++c.i;
        continue;
      }
      if (c.peek() == '}') {
        ++c.i;
        return n;
      }
      c.fail("expected ',' or '}' in flow mapping");
    }
  }

  Node flow_seq(Cursor& c, int depth) {
    Node n;
    n.kind = Node::Kind::Seq;
    n.mark = c.mark();
    ++c.i;  // '['
    c.skip_blanks();
    if (c.peek() == ']') {
      ++c.i;
      return n;
    }
    for (;;) {
      n.items.push_back(flow_value(c, depth + 1, true));
      c.skip_blanks();
      if (c.peek() == ',') {
        ++c.i;
        continue;
      }
      if (c.peek() == ']') {
        ++c.i;
        return n;
      }
      c.fail("expected ',' or ']' in flow sequence");
    }
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

const Node* Node::find(std::string_view key) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) {
      return &values[i];
    }
  }
  return nullptr;
}

Node parse(std::string_view text) { return Reader(text).document(); }

const char* kind_name(Node::Kind k) noexcept {
  switch (k) {
    case Node::Kind::Null: return "empty value";
    case Node::Kind::Scalar: return "scalar";
    case Node::Kind::Map: return "mapping";
    case Node::Kind::Seq: return "sequence";
  }
  return "?";
}

}  // namespace maestro::yaml
