#include "maestro/integra.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "maestro/parser.hpp"
#include "maestro/printer.hpp"
#include "maestro/validate.hpp"

namespace maestro {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string with_span(const std::string& message, const SourceSpan& span) {
  return span.known() ? span.str() + ": " + message : message;
}

}  // namespace

IntegraError::IntegraError(Kind kind, const std::string& message, SourceSpan span,
                           std::vector<Diagnostic> diagnostics)
    : std::runtime_error(with_span(message, span)),
      kind_(kind),
      span_(std::move(span)),
      diagnostics_(std::move(diagnostics)) {}

const char* directive_name(TransformKind k) noexcept {
  switch (k) {
    case TransformKind::AddEventSpec: return "ADD_EVENT";
    case TransformKind::AddDataField: return "ADD_DATA_FIELD";
    case TransformKind::AddTriggerClause: return "ADD_TRIGGER";
    case TransformKind::GuardConditionsAnd: return "GUARD_AND";
    case TransformKind::GuardConditionsOr: return "GUARD_OR";
    case TransformKind::AddStateChange: return "ADD_STATE_CHANGE";
    case TransformKind::AddDelay: return "ADD_DELAY";
    case TransformKind::AddTypeSpec: return "ADD_TYPE";
    case TransformKind::AddInstance: return "ADD_INSTANCE";
    case TransformKind::AddAssertion: return "ADD_ASSERTION";
    case TransformKind::AddInitialConstraint: return "ADD_INITIAL";
    case TransformKind::DuplicateStateForNI: return "DUPLICATE_STATE_NI";
    case TransformKind::DuplicateEventsForNI: return "DUPLICATE_EVENTS_NI";
    case TransformKind::SecretFree: return "SECRET_FREE";
    case TransformKind::ObservableEqual: return "OBSERVABLE_EQUAL";
  }
  return "?";
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string Transform::target() const {
  return std::visit(overloaded{
                        [](const AddEventSpec& t) { return t.event.name; },
                        [](const AddDataField& t) { return t.event; },
                        [](const AddTriggerClause& t) { return t.event; },
                        [](const Guard& t) { return t.event; },
                        [](const AddStateChange& t) { return t.event; },
                        [](const AddDelay& t) { return t.event; },
                        [](const AddTypeSpec& t) { return t.type.name; },
                        [](const AddInstance& t) { return t.instance.name; },
                        [](const AddAssertion& t) { return t.assertion.name; },
                        [](const AddInitialConstraint&) { return std::string(); },
                        [](const Duplicate& t) { return t.first_suffix + "," + t.second_suffix; },
                        [](const FieldRef& t) { return t.field.str(); },
                    },
                    body);
}

std::string Transform::directive() const {
  std::string args = std::visit(
      overloaded{
          [](const AddEventSpec& t) {
            std::string s = t.event.name + ", " + quote(format_carried_data(t.event.carried_data)) + ", " +
                            quote(format_triggers(t.event.triggers)) + ", " +
                            quote(format_state_changes(t.event.state_changes)) + ", " +
                            std::to_string(t.event.delay) + ", " + (t.event.present_at_start ? "Yes" : "No");
            if (t.max_instances) s += ", " + std::to_string(*t.max_instances);
            return s;
          },
          [](const AddDataField& t) { return t.event + ", " + t.field.name + ", " + std::to_string(t.field.width); },
          [](const AddTriggerClause& t) { return t.event + ", " + to_string(t.clause); },
          [](const Guard& t) { return t.event + ", " + to_string(t.condition); },
          [](const AddStateChange& t) { return t.event + ", " + to_string(t.clause); },
          [](const AddDelay& t) { return t.event + ", " + std::to_string(t.amount); },
          [](const AddTypeSpec& t) { return t.type.name + ", " + format_carried_data(t.type.fields); },
          [](const AddInstance& t) { return t.instance.name + ", " + t.instance.type; },
          [](const AddAssertion& t) { return t.assertion.name + ", " + format_assertion(t.assertion); },
          [](const AddInitialConstraint& t) { return to_string(t.expr); },
          [](const Duplicate& t) { return t.first_suffix + ", " + t.second_suffix; },
          [](const FieldRef& t) { return t.field.str(); },
      },
      body);
  return std::string(directive_name(kind)) + " " + args;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Arg {
  std::string text;
  int column = 1;  // 1-based column of text[0]
};

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quote) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_quote = false;
      }
      continue;
    }
    if (c == '"') {
      in_quote = true;
    } else if (c == '#') {
      const bool line_start = line.find_first_not_of(" \t") == i;
      const bool spaced = i + 1 >= line.size() || line[i + 1] == ' ' || line[i + 1] == '\t';
      const bool after_blank = i > 0 && (line[i - 1] == ' ' || line[i - 1] == '\t');
      if (line_start || (spaced && after_blank)) return line.substr(0, i);
    }
  }
  return line;
}

Arg trimmed(const std::string& s, int column) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {"", column};
  const auto e = s.find_last_not_of(" \t\r");
  return {s.substr(b, e - b + 1), column + static_cast<int>(b)};
}

/// Splits on top-level commas; at most `max_parts` parts when nonzero.
std::vector<Arg> split_args(const std::string& s, int column, std::size_t max_parts, const SourceSpan& at) {
  std::vector<Arg> out;
  int depth = 0;
  bool in_quote = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_quote) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_quote = false;
      }
      continue;
    }
    if (c == '"') {
      in_quote = true;
    } else if (c == '{' || c == '(') {
      ++depth;
    } else if (c == '}' || c == ')') {
      --depth;
    } else if (c == ',' && depth <= 0 && (max_parts == 0 || out.size() + 1 < max_parts)) {
      out.push_back(trimmed(s.substr(start, i - start), column + static_cast<int>(start)));
      start = i + 1;
    }
  }
  if (in_quote) {
    throw IntegraError(IntegraError::Kind::Syntax, "unterminated string", at);
  }
  Arg last = trimmed(s.substr(start), column + static_cast<int>(start));
  if (!last.text.empty() || !out.empty()) out.push_back(std::move(last));
  return out;
}

/// Removes surrounding double quotes and escapes, if present.
Arg unquote(const Arg& a, const SourceSpan& at) {
  if (a.text.size() < 2 || a.text.front() != '"' || a.text.back() != '"') return a;
  std::string out;
  for (std::size_t i = 1; i + 1 < a.text.size(); ++i) {
    if (a.text[i] == '\\' && i + 2 < a.text.size()) {
      out += a.text[++i];
    } else if (a.text[i] == '"') {
      throw IntegraError(IntegraError::Kind::Syntax, "stray quote inside argument", at);
    } else {
      out += a.text[i];
    }
  }
  return {out, a.column + 1};
}

class LineParser {
public:
  LineParser(std::string file, int line) : file_(std::move(file)), line_(line) {}

  [[nodiscard]] SourceSpan at(int column, int length = 1) const {
    SourceSpan s;
    s.file = file_;
    s.line = line_;
    s.column_begin = column;
    s.column_end = column + std::max(length, 1) - 1;
    return s;
  }
  [[nodiscard]] SourceSpan at(const Arg& a) const { return at(a.column, static_cast<int>(a.text.size())); }

  [[noreturn]] void fail(const std::string& msg, const SourceSpan& span) const {
    throw IntegraError(IntegraError::Kind::Syntax, msg, span);
  }

  std::string name(const Arg& a, const char* what) const {
    const Arg u = unquote(a, at(a));
    const std::string& s = u.text;
    const bool ok = !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) != 0 || s[0] == '_') &&
                    std::all_of(s.begin(), s.end(), [](char c) {
                      return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
                    });
    if (!ok) fail(std::string("invalid ") + what + " '" + s + "'", at(a));
    return s;
  }

  std::uint64_t number(const Arg& a, const char* what) const {
    const std::string s = unquote(a, at(a)).text;
    if (s.empty() || s.size() > 19 || s.find_first_not_of("0123456789") != std::string::npos) {
      fail(std::string(what) + " must be a non-negative integer, found '" + s + "'", at(a));
    }
    return std::stoull(s);
  }

  template <class F>
  auto sub(const Arg& a, F&& f) const {
    const Arg u = unquote(a, at(a));
    try {
      return f(u.text, at(u.column));
    } catch (const ParseError& e) {
      throw IntegraError(IntegraError::Kind::Syntax, e.message(), e.span());
    }
  }

private:
  std::string file_;
  int line_;
};

struct DirectiveInfo {
  TransformKind kind;
  std::size_t arity;  // 0 = variable (ADD_EVENT)
};

const std::map<std::string, DirectiveInfo>& directives() {
  static const std::map<std::string, DirectiveInfo> table = {
      {"ADD_EVENT", {TransformKind::AddEventSpec, 0}},
      {"ADD_DATA_FIELD", {TransformKind::AddDataField, 3}},
      {"ADD_TRIGGER", {TransformKind::AddTriggerClause, 2}},
      {"GUARD_AND", {TransformKind::GuardConditionsAnd, 2}},
      {"GUARD_OR", {TransformKind::GuardConditionsOr, 2}},
      {"ADD_STATE_CHANGE", {TransformKind::AddStateChange, 2}},
      {"ADD_DELAY", {TransformKind::AddDelay, 2}},
      {"ADD_TYPE", {TransformKind::AddTypeSpec, 2}},
      {"ADD_INSTANCE", {TransformKind::AddInstance, 2}},
      {"ADD_ASSERTION", {TransformKind::AddAssertion, 2}},
      {"ADD_INITIAL", {TransformKind::AddInitialConstraint, 1}},
      {"DUPLICATE_STATE_NI", {TransformKind::DuplicateStateForNI, 2}},
      {"DUPLICATE_EVENTS_NI", {TransformKind::DuplicateEventsForNI, 2}},
      {"SECRET_FREE", {TransformKind::SecretFree, 1}},
      {"OBSERVABLE_EQUAL", {TransformKind::ObservableEqual, 1}},
  };
  return table;
}

Transform parse_directive(const LineParser& p, const std::string& word, int word_column,
                          const std::vector<Arg>& args) {
  const auto it = directives().find(word);
  if (it == directives().end()) {
    p.fail("unknown directive '" + word + "'", p.at(word_column, static_cast<int>(word.size())));
  }
  const DirectiveInfo info = it->second;
  const SourceSpan word_span = p.at(word_column, static_cast<int>(word.size()));
  if (info.arity != 0 && args.size() != info.arity) {
    p.fail(word + " expects " + std::to_string(info.arity) + " argument(s), found " + std::to_string(args.size()),
           word_span);
  }
  for (const Arg& a : args) {
    if (a.text.empty()) p.fail("empty argument", p.at(a.column));
  }

  Transform t;
  t.kind = info.kind;
  t.span = word_span;
  switch (info.kind) {
    case TransformKind::AddEventSpec: {
      if (args.size() != 6 && args.size() != 7) {
        p.fail("ADD_EVENT expects 6 or 7 arguments, found " + std::to_string(args.size()), word_span);
      }
      Transform::AddEventSpec b;
      b.event.name = p.name(args[0], "event name");
      b.event.span = p.at(args[0]);
      b.event.carried_data = p.sub(args[1], [](const std::string& s, const SourceSpan& o) {
        return parse_carried_data(s, o);
      });
      b.event.triggers = p.sub(args[2], [](const std::string& s, const SourceSpan& o) {
        return parse_trigger_string(s, o);
      });
      b.event.state_changes = p.sub(args[3], [](const std::string& s, const SourceSpan& o) {
        return parse_statechange_string(s, o);
      });
      b.event.delay = p.number(args[4], "delay");
      const std::string flag = unquote(args[5], p.at(args[5])).text;
      if (flag != "Yes" && flag != "No") p.fail("present-at-start must be Yes or No", p.at(args[5]));
      b.event.present_at_start = flag == "Yes";
      if (args.size() == 7) {
        const std::uint64_t cap = p.number(args[6], "max instances");
        if (cap < 1 || cap > 1'000'000) p.fail("max instances must be in [1, 1000000]", p.at(args[6]));
        b.max_instances = static_cast<unsigned>(cap);
      }
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddDataField: {
      Transform::AddDataField b;
      b.event = p.name(args[0], "event name");
      b.field.name = p.name(args[1], "field name");
      std::string w = unquote(args[2], p.at(args[2])).text;
      if (w.rfind("BV[", 0) == 0 && w.back() == ']') w = w.substr(3, w.size() - 4);
      const std::uint64_t width = p.number({w, args[2].column}, "width");
      if (width < 1 || width > kMaxBitWidth) p.fail("width must be in [1, 64]", p.at(args[2]));
      b.field.width = static_cast<unsigned>(width);
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddTriggerClause: {
      Transform::AddTriggerClause b;
      b.event = p.name(args[0], "event name");
      auto clauses = p.sub(args[1], [](const std::string& s, const SourceSpan& o) {
        return parse_trigger_string(s, o);
      });
      if (clauses.size() != 1) p.fail("ADD_TRIGGER takes exactly one clause", p.at(args[1]));
      b.clause = std::move(clauses.front());
      t.body = std::move(b);
      break;
    }
    case TransformKind::GuardConditionsAnd:
    case TransformKind::GuardConditionsOr: {
      Transform::Guard b;
      b.event = p.name(args[0], "event name");
      b.condition = p.sub(args[1], [](const std::string& s, const SourceSpan& o) {
        return parse_bool_expr(s, o, false);
      });
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddStateChange: {
      Transform::AddStateChange b;
      b.event = p.name(args[0], "event name");
      auto clauses = p.sub(args[1], [](const std::string& s, const SourceSpan& o) {
        return parse_statechange_string(s, o);
      });
      if (clauses.size() != 1) p.fail("ADD_STATE_CHANGE takes exactly one clause", p.at(args[1]));
      b.clause = std::move(clauses.front());
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddDelay: {
      Transform::AddDelay b;
      b.event = p.name(args[0], "event name");
      b.amount = p.number(args[1], "delay amount");
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddTypeSpec: {
      Transform::AddTypeSpec b;
      b.type.name = p.name(args[0], "type name");
      b.type.span = p.at(args[0]);
      b.type.fields = p.sub(args[1], [](const std::string& s, const SourceSpan& o) {
        return parse_carried_data(s, o);
      });
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddInstance: {
      Transform::AddInstance b;
      b.instance.name = p.name(args[0], "instance name");
      b.instance.type = p.name(args[1], "type name");
      b.instance.span = p.at(args[0]);
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddAssertion: {
      Transform::AddAssertion b;
      const std::string name = p.name(args[0], "assertion name");
      b.assertion = p.sub(args[1], [&](const std::string& s, const SourceSpan& o) {
        return parse_assertion_string(s, name, o);
      });
      t.body = std::move(b);
      break;
    }
    case TransformKind::AddInitialConstraint: {
      Transform::AddInitialConstraint b;
      b.expr = p.sub(args[0], [](const std::string& s, const SourceSpan& o) {
        return parse_bool_expr(s, o, false);
      });
      t.body = std::move(b);
      break;
    }
    case TransformKind::DuplicateStateForNI:
    case TransformKind::DuplicateEventsForNI: {
      Transform::Duplicate b;
      b.first_suffix = p.name(args[0], "suffix");
      b.second_suffix = p.name(args[1], "suffix");
      if (b.first_suffix == b.second_suffix) p.fail("machine suffixes must differ", p.at(args[1]));
      t.body = std::move(b);
      break;
    }
    case TransformKind::SecretFree:
    case TransformKind::ObservableEqual: {
      Transform::FieldRef b;
      b.field = p.sub(args[0], [](const std::string& s, const SourceSpan& o) { return parse_state_key(s, o); });
      t.body = std::move(b);
      break;
    }
  }
  return t;
}

}  // namespace

TransformProgram parse_integra(std::string_view text, const std::string& file) {
  TransformProgram prog;
  prog.name = file.empty() ? "program" : std::filesystem::path(file).stem().string();
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineParser p(file, line_no);
    const std::string line = strip_comment(raw);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_first_of(" \t\r", b);
    if (e == std::string::npos) e = line.size();
    const std::string word = line.substr(b, e - b);
    const auto it = directives().find(word);
    const std::size_t arity = it == directives().end() ? 0 : it->second.arity;
    const std::vector<Arg> args =
        split_args(line.substr(e), static_cast<int>(e) + 1, arity, p.at(static_cast<int>(b) + 1));
    prog.transforms.push_back(parse_directive(p, word, static_cast<int>(b) + 1, args));
  }
  return prog;
}

TransformProgram load_integra(const std::string& path) { return parse_integra(read_file(path), path); }

std::string write_integra(const TransformProgram& p) {
  std::string out;
  for (const Transform& t : p.transforms) out += t.directive() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Composition

namespace {

std::vector<BoolPtr> disjuncts(const BoolPtr& b) {
  std::vector<BoolPtr> out;
  if (const auto* j = std::get_if<BoolExpr::Join>(&b->node); j != nullptr && j->op == Junction::Or) {
    auto l = disjuncts(j->lhs);
    auto r = disjuncts(j->rhs);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
  } else {
    out.push_back(b);
  }
  return out;
}

/// Keeps the first definition of a named element and rejects a different second one.
void keep_unique(std::map<std::string, Transform>& by_name, const Transform& t, const char* what) {
  auto [it, inserted] = by_name.try_emplace(t.target(), t);
  if (!inserted && it->second.directive() != t.directive()) {
    throw IntegraError(IntegraError::Kind::Conflict,
                       std::string("conflicting definitions of ") + what + " '" + t.target() + "'", t.span);
  }
}

}  // namespace

TransformProgram compose(const std::vector<TransformProgram>& programs) {
  TransformProgram out;
  for (const TransformProgram& p : programs) {
    out.name += (out.name.empty() ? "" : "+") + p.name;
  }

  std::map<std::string, Transform> events, types, instances, assertions;
  std::map<std::string, std::uint64_t> delays;
  std::map<std::string, SourceSpan> delay_spans;
  struct GuardSet {
    TransformKind kind;
    std::map<std::string, BoolPtr> terms;  // canonical text -> term
    SourceSpan span;
  };
  std::map<std::string, GuardSet> guards;
  std::optional<Transform> dup_state, dup_events;
  std::map<std::pair<int, std::string>, Transform> rest;  // (kind, directive)

  for (const TransformProgram& p : programs) {
    for (const Transform& t : p.transforms) {
      switch (t.kind) {
        case TransformKind::AddEventSpec: keep_unique(events, t, "event"); break;
        case TransformKind::AddTypeSpec: keep_unique(types, t, "type"); break;
        case TransformKind::AddInstance: keep_unique(instances, t, "instance"); break;
        case TransformKind::AddAssertion: keep_unique(assertions, t, "assertion"); break;
        case TransformKind::AddDelay: {
          const auto& d = std::get<Transform::AddDelay>(t.body);
          std::uint64_t& sum = delays[d.event];
          if (sum > std::numeric_limits<std::uint64_t>::max() - d.amount) {
            throw IntegraError(IntegraError::Kind::Conflict, "delay overflow on '" + d.event + "'", t.span);
          }
          sum += d.amount;
          delay_spans.try_emplace(d.event, t.span);
          break;
        }
        case TransformKind::GuardConditionsAnd:
        case TransformKind::GuardConditionsOr: {
          const auto& g = std::get<Transform::Guard>(t.body);
          auto [it, inserted] = guards.try_emplace(g.event, GuardSet{t.kind, {}, t.span});
          if (it->second.kind != t.kind) {
            throw IntegraError(IntegraError::Kind::ANDORConflict,
                               "event '" + g.event + "' is guarded with both GUARD_AND and GUARD_OR", t.span);
          }
          const auto terms = t.kind == TransformKind::GuardConditionsAnd ? conjuncts(g.condition)
                                                                          : disjuncts(g.condition);
          for (const BoolPtr& term : terms) it->second.terms.try_emplace(to_string(term), term);
          break;
        }
        case TransformKind::DuplicateStateForNI:
        case TransformKind::DuplicateEventsForNI: {
          std::optional<Transform>& slot = t.kind == TransformKind::DuplicateStateForNI ? dup_state : dup_events;
          if (slot && slot->directive() != t.directive()) {
            throw IntegraError(IntegraError::Kind::Conflict, "conflicting machine suffixes for duplication", t.span);
          }
          if (!slot) slot = t;
          break;
        }
        default: rest.try_emplace({static_cast<int>(t.kind), t.directive()}, t); break;
      }
    }
  }

  std::vector<Transform> all;
  for (auto& [n, t] : events) all.push_back(t);
  for (auto& [n, t] : types) all.push_back(t);
  for (auto& [n, t] : instances) all.push_back(t);
  for (auto& [n, t] : assertions) all.push_back(t);
  for (auto& [ev, amount] : delays) {
    Transform t;
    t.kind = TransformKind::AddDelay;
    t.body = Transform::AddDelay{ev, amount};
    t.span = delay_spans[ev];
    all.push_back(std::move(t));
  }
  for (auto& [ev, set] : guards) {
    BoolPtr folded;
    for (auto& [text, term] : set.terms) {
      if (!folded) {
        folded = term;
      } else {
        folded = set.kind == TransformKind::GuardConditionsAnd ? make_and(folded, term) : make_or(folded, term);
      }
    }
    Transform t;
    t.kind = set.kind;
    t.body = Transform::Guard{ev, folded};
    t.span = set.span;
    all.push_back(std::move(t));
  }
  if (dup_state) all.push_back(*dup_state);
  if (dup_events) all.push_back(*dup_events);
  for (auto& [key, t] : rest) all.push_back(t);

  std::stable_sort(all.begin(), all.end(), [](const Transform& a, const Transform& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    const std::string ta = a.target(), tb = b.target();
    if (ta != tb) return ta < tb;
    return a.directive() < b.directive();
  });
  out.transforms = std::move(all);
  return out;
}

// ---------------------------------------------------------------------------
// Application

namespace {

[[noreturn]] void unresolved(const std::string& what, const Transform& t) {
  throw IntegraError(IntegraError::Kind::UnresolvedReference,
                     std::string(directive_name(t.kind)) + ": unresolved " + what, t.span);
}

EventSpec& require_event(Model& m, const std::string& name, const Transform& t) {
  for (EventSpec& e : m.events) {
    if (e.name == name) return e;
  }
  unresolved("event '" + name + "'", t);
}

void require_field(const Model& m, const StateKey& key, const Transform& t) {
  if (!m.state.width_of(key)) unresolved("state field '" + key.str() + "'", t);
}

EventSpec rename_event(const EventSpec& ev, const RefRewriter& rw) {
  EventSpec out = ev;
  out.name = rw.event(ev.name);
  for (TriggerClause& c : out.triggers) {
    c.condition = rewrite(c.condition, rw);
    c.target = rw.event(c.target);
    for (auto& [field, value] : c.assignments) value = rewrite(value, rw);
  }
  for (StateChangeClause& c : out.state_changes) {
    c.condition = rewrite(c.condition, rw);
    c.target = rw.state(c.target);
    c.value = rewrite(c.value, rw);
  }
  return out;
}

Model duplicate_for_ni(const Model& m, const std::string& s1, const std::string& s2,
                       const std::set<StateKey>& secrets, const std::vector<StateKey>& observables) {
  auto rewriter = [](const std::string& suffix) {
    RefRewriter rw;
    rw.state = [suffix](const StateKey& k) { return StateKey{k.instance + "_" + suffix, k.field}; };
    rw.event = [suffix](const std::string& e) { return e + "_" + suffix; };
    return rw;
  };
  const RefRewriter r1 = rewriter(s1), r2 = rewriter(s2);

  Model out;
  out.source = m.source;
  out.max_steps = m.max_steps;
  out.int_width = m.int_width;
  out.state.types = m.state.types;
  for (const RefRewriter* rw : {&r1, &r2}) {
    for (const InstanceSpec& inst : m.state.instances) {
      InstanceSpec copy = inst;
      copy.name = rw->state({inst.name, ""}).instance;
      out.state.instances.push_back(std::move(copy));
    }
  }
  for (const RefRewriter* rw : {&r1, &r2}) {
    for (const EventSpec& ev : m.events) {
      out.events.push_back(rename_event(ev, *rw));
    }
  }
  for (const auto& [ev, cap] : m.instance_caps) {
    out.instance_caps[r1.event(ev)] = cap;
    out.instance_caps[r2.event(ev)] = cap;
  }
  for (const Assertion& a : m.assertions) {
    for (const auto& [rw, suffix] : {std::pair{&r1, &s1}, std::pair{&r2, &s2}}) {
      Assertion copy = a;
      copy.name = a.name + "_" + *suffix;
      copy.body = rewrite(a.body, *rw);
      out.assertions.push_back(std::move(copy));
    }
  }
  for (const StateKey& k : observables) {
    Assertion a;
    a.name = "NonInterference_" + k.instance + "_" + k.field;
    a.mode = AssertionMode::Always;
    a.body = make_compare(CmpOp::Eq, make_state(r1.state(k)), make_state(r2.state(k)));
    out.assertions.push_back(std::move(a));
  }
  for (const InitialConstraint& c : m.initial_constraints) {
    for (const auto& [rw, suffix] : {std::pair{&r1, &s1}, std::pair{&r2, &s2}}) {
      InitialConstraint copy = c;
      copy.name = (c.name.empty() ? "Constraint" : c.name) + "_" + *suffix;
      copy.expr = rewrite(c.expr, *rw);
      out.initial_constraints.push_back(std::move(copy));
    }
  }
  for (const FieldInfo& f : m.fields()) {
    if (secrets.count(f.key) != 0) continue;
    InitialConstraint c;
    c.name = "Equal_" + f.key.instance + "_" + f.key.field;
    c.expr = make_compare(CmpOp::Eq, make_state(r1.state(f.key)), make_state(r2.state(f.key)));
    out.initial_constraints.push_back(std::move(c));
  }
  return out;
}

}  // namespace

Model apply(const Model& base, const TransformProgram& program) {
  const TransformProgram canon = compose({program});
  Model m = base;

  // Clauses present before this program's additions; only these are guarded.
  std::map<std::string, std::pair<std::size_t, std::size_t>> original;
  for (const EventSpec& e : m.events) original[e.name] = {e.triggers.size(), e.state_changes.size()};

  std::optional<Transform::Duplicate> dup_state, dup_events;
  std::set<StateKey> secrets;
  std::vector<StateKey> observables;
  std::size_t added_initial = 0;

  // Pass 1: declarations.
  for (const Transform& t : canon.transforms) {
    if (const auto* b = std::get_if<Transform::AddTypeSpec>(&t.body)) {
      if (const TypeSpec* existing = m.state.find_type(b->type.name)) {
        if (!(*existing == b->type)) {
          throw IntegraError(IntegraError::Kind::Conflict, "type '" + b->type.name + "' already defined differently",
                             t.span);
        }
        continue;
      }
      m.state.types.push_back(b->type);
    } else if (const auto* b = std::get_if<Transform::AddInstance>(&t.body)) {
      if (const InstanceSpec* existing = m.state.find_instance(b->instance.name)) {
        if (!(*existing == b->instance)) {
          throw IntegraError(IntegraError::Kind::Conflict,
                             "instance '" + b->instance.name + "' already defined differently", t.span);
        }
        continue;
      }
      m.state.instances.push_back(b->instance);
    } else if (const auto* b = std::get_if<Transform::AddEventSpec>(&t.body)) {
      if (const EventSpec* existing = m.find_event(b->event.name)) {
        if (!(*existing == b->event)) {
          throw IntegraError(IntegraError::Kind::Conflict,
                             "event '" + b->event.name + "' already defined differently", t.span);
        }
        continue;
      }
      m.events.push_back(b->event);
      original[b->event.name] = {b->event.triggers.size(), b->event.state_changes.size()};
      if (b->max_instances) m.instance_caps[b->event.name] = *b->max_instances;
    }
  }

  // Pass 2: modifications of existing elements.
  for (const Transform& t : canon.transforms) {
    std::visit(
        overloaded{
            [&](const Transform::AddDataField& b) {
              EventSpec& ev = require_event(m, b.event, t);
              if (const DataField* f = ev.find_data(b.field.name)) {
                if (f->width != b.field.width) {
                  throw IntegraError(IntegraError::Kind::Conflict,
                                     "data field '" + b.field.name + "' of '" + b.event + "' has a different width",
                                     t.span);
                }
                return;
              }
              ev.carried_data.push_back(b.field);
            },
            [&](const Transform::Guard& b) {
              EventSpec& ev = require_event(m, b.event, t);
              const auto [ntrig, nsc] = original[b.event];
              const bool conj = t.kind == TransformKind::GuardConditionsAnd;
              auto guard = [&](BoolPtr& cond) {
                if (conj) {
                  cond = is_true_const(cond) ? b.condition : make_and(cond, b.condition);
                } else if (!is_true_const(cond)) {
                  cond = make_or(cond, b.condition);
                }
              };
              for (std::size_t i = 0; i < ntrig; ++i) guard(ev.triggers[i].condition);
              for (std::size_t i = 0; i < nsc; ++i) guard(ev.state_changes[i].condition);
            },
            [&](const Transform::AddTriggerClause& b) { require_event(m, b.event, t).triggers.push_back(b.clause); },
            [&](const Transform::AddStateChange& b) {
              require_event(m, b.event, t).state_changes.push_back(b.clause);
            },
            [&](const Transform::AddDelay& b) {
              EventSpec& ev = require_event(m, b.event, t);
              if (ev.delay > std::numeric_limits<std::uint64_t>::max() - b.amount) {
                throw IntegraError(IntegraError::Kind::Conflict, "delay overflow on '" + b.event + "'", t.span);
              }
              ev.delay += b.amount;
            },
            [&](const Transform::AddAssertion& b) {
              for (const Assertion& a : m.assertions) {
                if (a.name == b.assertion.name) {
                  if (!(a == b.assertion)) {
                    throw IntegraError(IntegraError::Kind::Conflict,
                                       "assertion '" + a.name + "' already defined differently", t.span);
                  }
                  return;
                }
              }
              m.assertions.push_back(b.assertion);
            },
            [&](const Transform::AddInitialConstraint& b) {
              InitialConstraint c;
              c.name = "Added" + std::to_string(++added_initial);
              c.expr = b.expr;
              c.span = t.span;
              m.initial_constraints.push_back(std::move(c));
            },
            [&](const Transform::Duplicate& b) {
              (t.kind == TransformKind::DuplicateStateForNI ? dup_state : dup_events) = b;
            },
            [&](const Transform::FieldRef& b) {
              require_field(m, b.field, t);
              if (t.kind == TransformKind::SecretFree) {
                secrets.insert(b.field);
              } else {
                observables.push_back(b.field);
              }
            },
            [](const auto&) {},
        },
        t.body);
  }

  const bool wants_ni = dup_state || dup_events || !secrets.empty() || !observables.empty();
  if (wants_ni) {
    if (!dup_state || !dup_events) {
      throw IntegraError(IntegraError::Kind::UnresolvedReference,
                         "non-interference transforms need both DUPLICATE_STATE_NI and DUPLICATE_EVENTS_NI");
    }
    if (dup_state->first_suffix != dup_events->first_suffix ||
        dup_state->second_suffix != dup_events->second_suffix) {
      throw IntegraError(IntegraError::Kind::Conflict, "state and event duplication use different suffixes");
    }
    m = duplicate_for_ni(m, dup_state->first_suffix, dup_state->second_suffix, secrets, observables);
  }

  std::vector<Diagnostic> diags = validate(m);
  if (has_errors(diags)) {
    std::string msg = "transformed model is invalid";
    for (const Diagnostic& d : diags) {
      if (d.severity == Severity::Error) msg += "\n  " + d.str();
    }
    throw IntegraError(IntegraError::Kind::InvalidResult, msg, {}, std::move(diags));
  }
  return m;
}

}  // namespace maestro
