#include "maestro/printer.hpp"

#include <sstream>

namespace maestro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Precedence levels. Arithmetic: binary 1, atom 2. Boolean: or 1, and 2, not 3, atom 4.

void print_expr(std::ostream& os, const ExprPtr& e, int min_prec) {
  std::visit(overloaded{
                 [&](const Expr::Literal& l) { os << l.value; },
                 [&](const Expr::State& s) { os << s.key.str() << (s.primed ? "'" : ""); },
                 [&](const Expr::Data& d) { os << "self." << d.field; },
                 [&](const Expr::Time& t) { os << "time" << (t.primed ? "'" : ""); },
                 [&](const Expr::Count& c) { os << '#' << c.event << (c.primed ? "'" : ""); },
                 [&](const Expr::Binary& b) {
                   const bool parens = min_prec > 1;
                   if (parens) os << '(';
                   print_expr(os, b.lhs, 1);
                   os << (b.op == ArithOp::Add ? " + " : " - ");
                   print_expr(os, b.rhs, 2);
                   if (parens) os << ')';
                 },
             },
             e->node);
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return " = ";
    case CmpOp::Ne: return " != ";
    case CmpOp::Lt: return " < ";
    case CmpOp::Le: return " <= ";
    case CmpOp::Gt: return " > ";
    case CmpOp::Ge: return " >= ";
  }
  return " ? ";
}

void print_bool(std::ostream& os, const BoolPtr& b, int min_prec) {
  std::visit(overloaded{
                 [&](const BoolExpr::Const& c) { os << (c.value ? "true" : "false"); },
                 [&](const BoolExpr::Compare& c) {
                   print_expr(os, c.lhs, 1);
                   os << cmp_text(c.op);
                   print_expr(os, c.rhs, 1);
                 },
                 [&](const BoolExpr::Not& n) {
                   const bool parens = min_prec > 3;
                   if (parens) os << '(';
                   os << "not ";
                   print_bool(os, n.operand, 3);
                   if (parens) os << ')';
                 },
                 [&](const BoolExpr::Join& j) {
                   const int prec = j.op == Junction::Or ? 1 : 2;
                   const bool parens = min_prec > prec;
                   if (parens) os << '(';
                   print_bool(os, j.lhs, prec);
                   os << (j.op == Junction::Or ? " or " : " and ");
                   print_bool(os, j.rhs, prec + 1);
                   if (parens) os << ')';
                 },
             },
             b->node);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, 1);
  return os.str();
}

std::string to_string(const BoolPtr& b) {
  std::ostringstream os;
  print_bool(os, b, 1);
  return os.str();
}

std::string to_string(const TriggerClause& t) {
  std::string out;
  if (!is_true_const(t.condition)) {
    out = "IF " + to_string(t.condition) + " : ";
  }
  out += "Trigger " + t.target + "{";
  if (t.assignments.empty()) {
    out += "NONE";
  } else {
    bool first = true;
    for (const auto& [field, value] : t.assignments) {
      if (!first) out += ", ";
      first = false;
      out += field + "=" + to_string(value);
    }
  }
  return out + "}";
}

std::string to_string(const StateChangeClause& sc) {
  std::string out;
  if (!is_true_const(sc.condition)) {
    out = "IF " + to_string(sc.condition) + " : ";
  }
  return out + "SC " + sc.target.str() + " <- " + to_string(sc.value);
}

std::string format_triggers(const std::vector<TriggerClause>& ts) {
  if (ts.empty()) return "None";
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i != 0) out += "; ";
    out += to_string(ts[i]);
  }
  return out;
}

std::string format_state_changes(const std::vector<StateChangeClause>& scs) {
  if (scs.empty()) return "None";
  std::string out;
  for (std::size_t i = 0; i < scs.size(); ++i) {
    if (i != 0) out += "; ";
    out += to_string(scs[i]);
  }
  return out;
}

std::string format_carried_data(const std::vector<DataField>& data) {
  if (data.empty()) return "None";
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i != 0) out += ", ";
    out += data[i].name + ": BV[" + std::to_string(data[i].width) + "]";
  }
  return out;
}

std::string format_assertion(const Assertion& a) {
  return std::string(a.mode == AssertionMode::Always ? "ALWAYS " : "FINALLY ") + to_string(a.body);
}

std::string write_model(const Model& m) {
  std::ostringstream os;
  os << "---\nMachineState:\n";
  os << "  - TypeSpec:" << (m.state.types.empty() ? " []" : "") << "\n";
  for (const TypeSpec& t : m.state.types) {
    os << "     - " << t.name << ": {";
    for (std::size_t i = 0; i < t.fields.size(); ++i) {
      if (i != 0) os << ", ";
      os << t.fields[i].name << ": BV[" << t.fields[i].width << "]";
    }
    os << "}\n";
  }
  os << "  - InstanceSpec:" << (m.state.instances.empty() ? " []" : "") << "\n";
  for (const InstanceSpec& inst : m.state.instances) {
    os << "     - " << inst.name << ": " << inst.type << "\n";
  }
  os << "Events:\n";
  for (const EventSpec& ev : m.events) {
    os << "  - Name: " << quoted(ev.name) << "\n";
    os << "    CarriesData: " << quoted(format_carried_data(ev.carried_data)) << "\n";
    os << "    TriggersEvent: " << quoted(format_triggers(ev.triggers)) << "\n";
    os << "    StateChanges: " << quoted(format_state_changes(ev.state_changes)) << "\n";
    os << "    TimingDelay: \"" << ev.delay << "\"\n";
    os << "    PresentAtStart: \"" << (ev.present_at_start ? "Yes" : "No") << "\"\n";
    if (auto it = m.instance_caps.find(ev.name); it != m.instance_caps.end()) {
      os << "    MaxInstances: " << it->second << "\n";
    }
  }
  os << "Assertions:" << (m.assertions.empty() ? " []" : "") << "\n";
  for (const Assertion& a : m.assertions) {
    os << "   - Name: " << quoted(a.name) << "\n";
    os << "     Assert: " << quoted(format_assertion(a)) << "\n";
  }
  os << "InitialState:" << (m.initial_constraints.empty() ? " []" : "") << "\n";
  for (std::size_t i = 0; i < m.initial_constraints.size(); ++i) {
    const InitialConstraint& c = m.initial_constraints[i];
    const std::string label = c.name.empty() ? "Constraint" + std::to_string(i + 1) : c.name;
    os << "   - " << label << ": " << quoted(to_string(c.expr)) << "\n";
  }
  os << "MaxSteps: " << m.max_steps << "\n";
  os << "IntWidth: " << m.int_width << "\n";
  return os.str();
}

}  // namespace maestro
