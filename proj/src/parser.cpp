#include "maestro/parser.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "maestro/validate.hpp"
#include "maestro/yaml_lite.hpp"

namespace maestro {

ModelError::ModelError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid model";
        for (const Diagnostic& d : diagnostics) {
          if (d.severity == Severity::Error) {
            msg += "\n  " + d.str();
          }
        }
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

namespace {

constexpr int kMaxNesting = 200;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident, Number, Dot, Prime, Plus, Minus, Eq, Ne, Lt, Le, Gt, Ge,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi, Colon, Arrow, Hash, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t number = 0;
  int offset = 0;  // byte offset in the source string
  int length = 0;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Dot: return "'.'";
    case Tok::Prime: return "'''";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'<-'";
    case Tok::Hash: return "'#'";
    case Tok::End: return "end of input";
  }
  return "?";
}

SourceSpan span_at(const SourceSpan& origin, int offset, int length) {
  SourceSpan s = origin;
  if (!s.known()) {
    s.line = 1;
    s.column_begin = 1;
  }
  s.column_begin += offset;
  s.column_end = s.column_begin + std::max(length, 1) - 1;
  return s;
}

std::vector<Token> lex(std::string_view src, const SourceSpan& origin) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(src.substr(i, len)), 0, static_cast<int>(i), static_cast<int>(len)});
    i += len;
  };
  while (i < src.size()) {
    const auto c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c) != 0) {
      ++i;
      continue;
    }
    if (std::isalpha(c) != 0 || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) != 0 || src[j] == '_')) {
        ++j;
      }
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(c) != 0) {
      std::size_t j = i;
      std::uint64_t value = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) {
        const std::uint64_t digit = static_cast<std::uint64_t>(src[j] - '0');
        if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
          throw ParseError("integer literal out of range", span_at(origin, static_cast<int>(i), 1));
        }
        value = value * 10 + digit;
        ++j;
      }
      push(Tok::Number, j - i);
      out.back().number = value;
      continue;
    }
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '.': push(Tok::Dot, 1); continue;
      case '\'': push(Tok::Prime, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '=': push(Tok::Eq, next == '=' ? 2 : 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case ':': push(Tok::Colon, 1); continue;
      case '#': push(Tok::Hash, 1); continue;
      case '!':
        if (next == '=') {
          push(Tok::Ne, 2);
          continue;
        }
        break;
      case '<':
        if (next == '-') {
          push(Tok::Arrow, 2);
        } else if (next == '=') {
          push(Tok::Le, 2);
        } else {
          push(Tok::Lt, 1);
        }
        continue;
      case '>':
        push(next == '=' ? Tok::Ge : Tok::Gt, next == '=' ? 2 : 1);
        continue;
      default: break;
    }
    throw ParseError("unexpected character '" + std::string(1, static_cast<char>(c)) + "'",
                     span_at(origin, static_cast<int>(i), 1));
  }
  out.push_back({Tok::End, "", 0, static_cast<int>(src.size()), 0});
  return out;
}

bool is_reserved(const std::string& s) {
  return s == "and" || s == "or" || s == "not" || s == "true" || s == "false" || s == "IF" ||
         s == "SC" || s == "Trigger" || s == "ALWAYS" || s == "FINALLY" || s == "NONE";
}

// ---------------------------------------------------------------------------
// Recursive-descent parser over one embedded string

class Parser {
public:
  Parser(std::string_view src, SourceSpan origin) : origin_(std::move(origin)), toks_(lex(src, origin_)) {
    match_parens();
  }

  bool allow_primed = false;
  const char* primed_context = "this context";

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[nodiscard]] bool at(Tok k) const { return peek().kind == k; }
  [[nodiscard]] bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(msg, span_at(origin_, t.offset, t.length));
  }

  const Token& expect(Tok k, const char* what = nullptr) {
    if (!at(k)) {
      fail(std::string("expected ") + (what != nullptr ? what : tok_name(k)) + ", found " + describe(peek()));
    }
    return toks_[pos_++];
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) {
      fail("expected '" + std::string(w) + "', found " + describe(peek()));
    }
    ++pos_;
  }

  std::string ident(const char* what) {
    if (!at(Tok::Ident)) {
      fail(std::string("expected ") + what + ", found " + describe(peek()));
    }
    if (is_reserved(peek().text)) {
      fail(std::string("keyword '") + peek().text + "' cannot be used as " + what);
    }
    return toks_[pos_++].text;
  }

  void expect_end() {
    if (!at(Tok::End)) {
      fail("unexpected " + describe(peek()));
    }
  }

  [[nodiscard]] bool at_none_list() const {
    return (at_word("None") || at_word("NONE")) && peek(1).kind == Tok::End;
  }

  [[nodiscard]] SourceSpan span_from(std::size_t first_tok) const {
    const Token& a = toks_[first_tok];
    const Token& b = toks_[pos_ > first_tok ? pos_ - 1 : first_tok];
    return span_at(origin_, a.offset, b.offset + b.length - a.offset);
  }

  [[nodiscard]] std::size_t pos() const { return pos_; }

  // ---- arithmetic ---------------------------------------------------------

  ExprPtr expr() {
    Depth guard(*this);
    ExprPtr lhs = term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
      ++pos_;
      lhs = make_binary(op, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    Depth guard(*this);
    if (at(Tok::Number)) {
      return make_literal(toks_[pos_++].number);
    }
    if (at(Tok::LParen)) {
      ++pos_;
      ExprPtr e = expr();
      expect(Tok::RParen);
      return e;
    }
    if (at(Tok::Hash)) {
      ++pos_;
      std::string ev = ident("event name");
      return make_count(std::move(ev), prime());
    }
    if (at_word("time")) {
      ++pos_;
      return make_time(prime());
    }
    if (at_word("self")) {
      ++pos_;
      expect(Tok::Dot);
      return make_data(ident("carried-data field"));
    }
    if (at(Tok::Ident)) {
      StateKey key = state_key();
      return make_state(std::move(key), prime());
    }
    fail("expected an expression, found " + describe(peek()));
  }

  StateKey state_key() {
    std::string inst = ident("instance name");
    expect(Tok::Dot, "'.' in state reference");
    std::string field = ident("field name");
    return {std::move(inst), std::move(field)};
  }

  bool prime() {
    if (!at(Tok::Prime)) {
      return false;
    }
    if (!allow_primed) {
      fail(std::string("primed reference illegal in ") + primed_context);
    }
    ++pos_;
    return true;
  }

  // ---- boolean ------------------------------------------------------------

  BoolPtr disjunction() {
    Depth guard(*this);
    BoolPtr lhs = conjunction();
    while (at_word("or")) {
      ++pos_;
      lhs = make_or(lhs, conjunction());
    }
    return lhs;
  }

  BoolPtr conjunction() {
    Depth guard(*this);
    BoolPtr lhs = unary();
    while (at_word("and")) {
      ++pos_;
      lhs = make_and(lhs, unary());
    }
    return lhs;
  }

  BoolPtr unary() {
    Depth guard(*this);
    if (at_word("not")) {
      ++pos_;
      return make_not(unary());
    }
    if (at_word("true") || at_word("false")) {
      return make_const(toks_[pos_++].text == "true");
    }
    if (at(Tok::LParen) && paren_is_boolean(pos_)) {
      ++pos_;
      BoolPtr b = disjunction();
      expect(Tok::RParen);
      return b;
    }
    return comparison();
  }

  BoolPtr comparison() {
    ExprPtr lhs = expr();
    CmpOp op{};
    switch (peek().kind) {
      case Tok::Eq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      default: fail("expected a comparison operator, found " + describe(peek()));
    }
    ++pos_;
    return make_compare(op, lhs, expr());
  }

  // ---- clauses ------------------------------------------------------------

  BoolPtr guard() {
    if (!at_word("IF")) {
      return make_const(true);
    }
    ++pos_;
    BoolPtr cond = disjunction();
    expect(Tok::Colon, "':' after IF condition");
    return cond;
  }

  TriggerClause trigger_clause() {
    const std::size_t first = pos_;
    TriggerClause t;
    t.condition = guard();
    expect_word("Trigger");
    t.target = ident("event name");
    expect(Tok::LBrace);
    if (at_word("NONE")) {
      ++pos_;
    } else {
      for (;;) {
        const Token& name_tok = peek();
        std::string field = ident("data field");
        expect(Tok::Eq);
        if (t.assignments.count(field) != 0) {
          fail_at(name_tok, "duplicate assignment to '" + field + "'");
        }
        t.assignments.emplace(std::move(field), expr());
        if (!at(Tok::Comma)) {
          break;
        }
        ++pos_;
      }
    }
    expect(Tok::RBrace);
    t.span = span_from(first);
    return t;
  }

  StateChangeClause statechange_clause() {
    const std::size_t first = pos_;
    StateChangeClause sc;
    sc.condition = guard();
    expect_word("SC");
    sc.target = state_key();
    if (at(Tok::Prime)) {
      fail("state-change target cannot be primed");
    }
    expect(Tok::Arrow);
    sc.value = expr();
    sc.span = span_from(first);
    return sc;
  }

  template <class F>
  auto clause_list(F&& one) {
    std::vector<decltype(one())> out;
    if (at_none_list()) {
      ++pos_;
      return out;
    }
    if (at(Tok::End)) {
      fail("expected a clause or 'None'");
    }
    for (;;) {
      out.push_back(one());
      if (!at(Tok::Semi)) {
        break;
      }
      ++pos_;
      if (at(Tok::End)) {
        break;  // trailing separator
      }
    }
    expect_end();
    return out;
  }

private:
  struct Depth {
    explicit Depth(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) {
        p_.fail("expression nested too deeply");
      }
    }
    ~Depth() { --p_.depth_; }
    Depth(const Depth&) = delete;
    Depth& operator=(const Depth&) = delete;
    Parser& p_;
  };

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) {
      return "end of input";
    }
    return "'" + t.text + "'";
  }

  void match_parens() {
    match_.assign(toks_.size(), -1);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (toks_[i].kind == Tok::LParen) {
        stack.push_back(i);
      } else if (toks_[i].kind == Tok::RParen && !stack.empty()) {
        match_[stack.back()] = static_cast<long>(i);
        stack.pop_back();
      }
    }
  }

  /// A parenthesised group is boolean unless an arithmetic or comparison
  /// operator follows its closing parenthesis.
  [[nodiscard]] bool paren_is_boolean(std::size_t open) const {
    const long close = match_[open];
    if (close < 0) {
      return true;  // unbalanced: the boolean path reports the missing ')'
    }
    switch (toks_[static_cast<std::size_t>(close) + 1].kind) {
      case Tok::Plus: case Tok::Minus: case Tok::Eq: case Tok::Ne:
      case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge:
        return false;
      default:
        return true;
    }
  }

  SourceSpan origin_;
  std::vector<Token> toks_;
  std::vector<long> match_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// YAML document -> Model

SourceSpan mark_span(const std::string& file, yaml::Mark m, int length = 1) {
  SourceSpan s;
  s.file = file;
  // An empty or scalar document has no node position; blame its start.
  s.line = std::max(m.line, 1);
  s.column_begin = std::max(m.column, 1);
  s.column_end = s.column_begin + std::max(length, 1) - 1;
  return s;
}

class ModelBuilder {
public:
  ModelBuilder(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  Model build() {
    yaml::Node root;
    try {
      root = yaml::parse(text_);
    } catch (const yaml::Error& e) {
      throw ParseError(e.what(), mark_span(file_, e.mark()));
    }
    if (!root.is_map()) {
      throw ParseError("model document must be a mapping of sections", span(root));
    }
    Model m;
    m.source = file_;
    static const char* const kKnown[] = {"MachineState", "Events", "Assertions",
                                         "InitialState", "MaxSteps", "IntWidth"};
    for (std::size_t i = 0; i < root.keys.size(); ++i) {
      bool known = false;
      for (const char* k : kKnown) known = known || root.keys[i] == k;
      if (!known) {
        throw ParseError("unknown section '" + root.keys[i] + "'",
                         mark_span(file_, root.key_marks[i], static_cast<int>(root.keys[i].size())));
      }
    }
    machine_state(require(root, "MachineState"), m.state);
    events(root, m);
    if (const yaml::Node* a = root.find("Assertions")) {
      assertions(*a, m);
    }
    if (const yaml::Node* init = root.find("InitialState")) {
      initial_state(*init, m);
    }
    m.max_steps = unsigned_scalar(require(root, "MaxSteps"), "MaxSteps");
    if (m.max_steps < 1) {
      throw ParseError("MaxSteps must be at least 1", span(*root.find("MaxSteps")));
    }
    const std::uint64_t width = unsigned_scalar(require(root, "IntWidth"), "IntWidth");
    if (width < 1 || width > 63) {
      throw ParseError("IntWidth must be in [1, 63]", span(*root.find("IntWidth")));
    }
    m.int_width = static_cast<unsigned>(width);
    return m;
  }

private:
  [[nodiscard]] SourceSpan span(const yaml::Node& n, int length = 1) const {
    return mark_span(file_, n.mark, length);
  }

  const yaml::Node& require(const yaml::Node& map, const char* key) {
    const yaml::Node* n = map.find(key);
    if (n == nullptr) {
      throw ParseError(std::string("missing required field '") + key + "'", span(map));
    }
    return *n;
  }

  const std::string& scalar(const yaml::Node& n, const char* what) {
    if (!n.is_scalar()) {
      throw ParseError(std::string(what) + " must be a scalar, found " + yaml::kind_name(n.kind), span(n));
    }
    return n.scalar;
  }

  std::uint64_t unsigned_scalar(const yaml::Node& n, const char* what) {
    const std::string& s = scalar(n, what);
    if (s.empty() || s.size() > 19 ||
        s.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(std::string(what) + " must be a non-negative integer, found '" + s + "'", span(n));
    }
    return std::stoull(s);
  }

  const yaml::Node& seq(const yaml::Node& n, const char* what) {
    if (!n.is_seq()) {
      throw ParseError(std::string(what) + " must be a list, found " + yaml::kind_name(n.kind), span(n));
    }
    return n;
  }

  /// A `- Name: value` list entry.
  std::pair<std::string, const yaml::Node*> single_entry(const yaml::Node& item, const char* what) {
    if (!item.is_map() || item.keys.size() != 1) {
      throw ParseError(std::string(what) + " entries must be single 'name: value' pairs", span(item));
    }
    return {item.keys[0], &item.values[0]};
  }

  void machine_state(const yaml::Node& n, StateDecl& decl) {
    auto section = [&](const std::string& key, const yaml::Node& body) {
      if (key == "TypeSpec") {
        type_specs(body, decl);
      } else if (key == "InstanceSpec") {
        instance_specs(body, decl);
      } else {
        throw ParseError("unknown MachineState part '" + key + "' (expected TypeSpec or InstanceSpec)",
                         span(body));
      }
    };
    if (n.is_map()) {
      for (std::size_t i = 0; i < n.keys.size(); ++i) section(n.keys[i], n.values[i]);
      return;
    }
    for (const yaml::Node& item : seq(n, "MachineState").items) {
      auto [key, body] = single_entry(item, "MachineState");
      section(key, *body);
    }
  }

  void type_specs(const yaml::Node& n, StateDecl& decl) {
    if (n.is_null()) return;
    for (const yaml::Node& item : seq(n, "TypeSpec").items) {
      auto [name, body] = single_entry(item, "TypeSpec");
      check_name(name, item);
      TypeSpec t;
      t.name = name;
      t.span = span(item, static_cast<int>(name.size()));
      if (!body->is_map()) {
        throw ParseError("type '" + name + "' must map field names to BV[width]", span(*body));
      }
      for (std::size_t i = 0; i < body->keys.size(); ++i) {
        check_name(body->keys[i], *body);
        t.fields.push_back({body->keys[i], width_spec(body->values[i])});
      }
      decl.types.push_back(std::move(t));
    }
  }

  unsigned width_spec(const yaml::Node& n) {
    const std::string& s = scalar(n, "field width");
    const auto open = s.find('[');
    const auto close = s.find(']');
    if (s.rfind("BV", 0) != 0 || open != 2 || close != s.size() - 1 || close <= open + 1) {
      throw ParseError("field width must be written BV[n], found '" + s + "'", span(n));
    }
    const std::string digits = s.substr(open + 1, close - open - 1);
    if (digits.size() > 3 || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("bad width in '" + s + "'", span(n));
    }
    const unsigned w = static_cast<unsigned>(std::stoul(digits));
    if (w < 1 || w > kMaxBitWidth) {
      throw ParseError("width must be in [1, 64], found " + digits, span(n));
    }
    return w;
  }

  void instance_specs(const yaml::Node& n, StateDecl& decl) {
    if (n.is_null()) return;
    for (const yaml::Node& item : seq(n, "InstanceSpec").items) {
      auto [name, body] = single_entry(item, "InstanceSpec");
      check_name(name, item);
      decl.instances.push_back({name, scalar(*body, "instance type"), span(item, static_cast<int>(name.size()))});
    }
  }

  void check_name(const std::string& name, const yaml::Node& at) {
    const bool ok = !name.empty() &&
                    (std::isalpha(static_cast<unsigned char>(name[0])) != 0 || name[0] == '_') &&
                    name.find_first_not_of(
                        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") ==
                        std::string::npos;
    if (!ok || is_reserved(name) || name == "self" || name == "time") {
      throw ParseError("invalid name '" + name + "'", span(at));
    }
  }

  /// Origin for an embedded string: where its first character sits.
  [[nodiscard]] SourceSpan origin(const yaml::Node& n) const { return mark_span(file_, n.mark); }

  void events(const yaml::Node& root, Model& m) {
    const yaml::Node& list = require(root, "Events");
    if (list.is_null() || (list.is_seq() && list.items.empty())) {
      throw ParseError("at least one event required", span(list));
    }
    static const char* const kFields[] = {"Name", "CarriesData", "TriggersEvent", "StateChanges",
                                          "TimingDelay", "PresentAtStart", "MaxInstances"};
    for (const yaml::Node& item : seq(list, "Events").items) {
      if (!item.is_map()) {
        throw ParseError("event entries must be mappings", span(item));
      }
      for (std::size_t i = 0; i < item.keys.size(); ++i) {
        bool known = false;
        for (const char* f : kFields) known = known || item.keys[i] == f;
        if (!known) {
          throw ParseError("unknown event field '" + item.keys[i] + "'",
                           mark_span(file_, item.key_marks[i], static_cast<int>(item.keys[i].size())));
        }
      }
      EventSpec ev;
      const yaml::Node& name = require(item, "Name");
      ev.name = scalar(name, "event Name");
      check_name(ev.name, name);
      ev.span = span(name, static_cast<int>(ev.name.size()));
      const yaml::Node& data = require(item, "CarriesData");
      ev.carried_data = parse_carried_data(scalar(data, "CarriesData"), origin(data));
      const yaml::Node& trig = require(item, "TriggersEvent");
      ev.triggers = parse_trigger_string(scalar(trig, "TriggersEvent"), origin(trig));
      const yaml::Node& sc = require(item, "StateChanges");
      ev.state_changes = parse_statechange_string(scalar(sc, "StateChanges"), origin(sc));
      ev.delay = unsigned_scalar(require(item, "TimingDelay"), "TimingDelay");
      const yaml::Node& pas = require(item, "PresentAtStart");
      const std::string& flag = scalar(pas, "PresentAtStart");
      if (flag != "Yes" && flag != "No") {
        throw ParseError("PresentAtStart must be \"Yes\" or \"No\", found '" + flag + "'", span(pas));
      }
      ev.present_at_start = flag == "Yes";
      if (const yaml::Node* cap = item.find("MaxInstances")) {
        const std::uint64_t v = unsigned_scalar(*cap, "MaxInstances");
        if (v < 1 || v > 1'000'000) {
          throw ParseError("MaxInstances must be in [1, 1000000]", span(*cap));
        }
        m.instance_caps[ev.name] = static_cast<unsigned>(v);
      }
      m.events.push_back(std::move(ev));
    }
  }

  void assertions(const yaml::Node& n, Model& m) {
    if (n.is_null()) return;
    for (const yaml::Node& item : seq(n, "Assertions").items) {
      if (!item.is_map()) {
        throw ParseError("assertion entries must be mappings with Name and Assert", span(item));
      }
      for (const std::string& k : item.keys) {
        if (k != "Name" && k != "Assert") {
          throw ParseError("unknown assertion field '" + k + "'", span(item));
        }
      }
      const yaml::Node& name = require(item, "Name");
      const yaml::Node& body = require(item, "Assert");
      Assertion a = parse_assertion_string(scalar(body, "Assert"), scalar(name, "assertion Name"), origin(body));
      m.assertions.push_back(std::move(a));
    }
  }

  void initial_state(const yaml::Node& n, Model& m) {
    if (n.is_null()) return;
    int index = 0;
    for (const yaml::Node& item : seq(n, "InitialState").items) {
      ++index;
      InitialConstraint c;
      const yaml::Node* body = &item;
      if (item.is_map()) {
        auto [label, value] = single_entry(item, "InitialState");
        c.name = label;
        body = value;
      } else {
        c.name = "Constraint" + std::to_string(index);
      }
      c.expr = parse_bool_expr(scalar(*body, "initial constraint"), origin(*body), false);
      c.span = span(*body);
      m.initial_constraints.push_back(std::move(c));
    }
  }

  std::string_view text_;
  std::string file_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

std::vector<TriggerClause> parse_trigger_string(std::string_view text, const SourceSpan& origin) {
  Parser p(text, origin);
  p.primed_context = "a trigger clause";
  return p.clause_list([&] { return p.trigger_clause(); });
}

std::vector<StateChangeClause> parse_statechange_string(std::string_view text, const SourceSpan& origin) {
  Parser p(text, origin);
  p.primed_context = "a state change";
  return p.clause_list([&] { return p.statechange_clause(); });
}

Assertion parse_assertion_string(std::string_view text, const std::string& name, const SourceSpan& origin) {
  Parser p(text, origin);
  Assertion a;
  a.name = name;
  const std::size_t first = p.pos();
  if (p.at_word("ALWAYS")) {
    a.mode = AssertionMode::Always;
    p.allow_primed = true;
  } else if (p.at_word("FINALLY")) {
    a.mode = AssertionMode::Finally;
    p.primed_context = "FINALLY";
  } else {
    p.fail("assertion must start with ALWAYS or FINALLY");
  }
  p.expect(Tok::Ident);
  a.body = p.disjunction();
  p.expect_end();
  a.span = p.span_from(first);
  return a;
}

BoolPtr parse_bool_expr(std::string_view text, const SourceSpan& origin, bool allow_primed) {
  Parser p(text, origin);
  p.allow_primed = allow_primed;
  p.primed_context = "an initial constraint or clause condition";
  BoolPtr b = p.disjunction();
  p.expect_end();
  return b;
}

ExprPtr parse_expr(std::string_view text, const SourceSpan& origin) {
  Parser p(text, origin);
  ExprPtr e = p.expr();
  p.expect_end();
  return e;
}

std::vector<DataField> parse_carried_data(std::string_view text, const SourceSpan& origin) {
  Parser p(text, origin);
  std::vector<DataField> out;
  if (p.at_none_list()) {
    return out;
  }
  for (;;) {
    DataField f;
    f.name = p.ident("data field name");
    p.expect(Tok::Colon);
    p.expect_word("BV");
    p.expect(Tok::LBracket);
    const Token& w = p.expect(Tok::Number, "width");
    if (w.number < 1 || w.number > kMaxBitWidth) {
      p.fail_at(w, "width must be in [1, 64]");
    }
    f.width = static_cast<unsigned>(w.number);
    p.expect(Tok::RBracket);
    out.push_back(std::move(f));
    if (!p.at(Tok::Comma)) {
      break;
    }
    p.expect(Tok::Comma);
  }
  p.expect_end();
  return out;
}

StateKey parse_state_key(std::string_view text, const SourceSpan& origin) {
  Parser p(text, origin);
  StateKey k = p.state_key();
  p.expect_end();
  return k;
}

Model parse_model_unchecked(std::string_view text, const std::string& file) {
  return ModelBuilder(text, file).build();
}

Model parse_model(std::string_view text, const std::string& file) {
  Model m = parse_model_unchecked(text, file);
  std::vector<Diagnostic> diags = validate(m);
  if (has_errors(diags)) {
    throw ModelError(std::move(diags));
  }
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Model load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.string());
}

}  // namespace maestro
