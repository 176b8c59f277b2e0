#include "maestro/alloy.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "maestro/eval.hpp"

namespace maestro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string sig_name(const StateKey& k) { return k.instance + "_" + k.field; }

/// `One, Zero, ...` for `value`, least significant bit first.
std::string bit_list(std::uint64_t value, unsigned width) {
  std::string out;
  for (unsigned i = 0; i < width; ++i) {
    if (i != 0) out += ", ";
    out += ((value >> i) & 1U) != 0 ? "One" : "Zero";
  }
  return out;
}

/// Translation of expressions to Alloy formulas and Int terms. `self_var`
/// names the quantified event instance that `self.<field>` reads.
class Translator {
public:
  Translator(const Model& m, std::string self_var = {}, const EventSpec* self_spec = nullptr)
      : m_(m), self_var_(std::move(self_var)), self_spec_(self_spec) {}

  [[nodiscard]] std::string term(const ExprPtr& e) const {
    return std::visit(
        overloaded{
            [](const Expr::Literal& l) { return std::to_string(l.value); },
            [&](const Expr::State& s) {
              const unsigned w = m_.state.width_of(s.key).value_or(1);
              return "val" + std::to_string(w) + "[" + sig_name(s.key) + ".val" + (s.primed ? "'" : "") + "]";
            },
            [&](const Expr::Data& d) {
              const DataField* f = self_spec_ != nullptr ? self_spec_->find_data(d.field) : nullptr;
              const unsigned w = f != nullptr ? f->width : 1;
              return "val" + std::to_string(w) + "[" + self_var_ + ".d_" + d.field + "]";
            },
            [](const Expr::Time& t) { return std::string("TimingRecord.time") + (t.primed ? "'" : ""); },
            [](const Expr::Count& c) {
              return std::string("#{e:") + c.event + " | e.status" + (c.primed ? "'" : "") + " >= 1}";
            },
            [&](const Expr::Binary& b) {
              return std::string(b.op == ArithOp::Add ? "add[" : "sub[") + term(b.lhs) + ", " + term(b.rhs) + "]";
            },
        },
        e->node);
  }

  [[nodiscard]] std::string formula(const BoolPtr& b) const {
    return std::visit(
        overloaded{
            [](const BoolExpr::Const& c) { return std::string(c.value ? "(no none)" : "(some none)"); },
            [&](const BoolExpr::Compare& c) { return compare(c); },
            [&](const BoolExpr::Not& n) { return "(not " + formula(n.operand) + ")"; },
            [&](const BoolExpr::Join& j) {
              return "(" + formula(j.lhs) + (j.op == Junction::And ? " and " : " or ") + formula(j.rhs) + ")";
            },
        },
        b->node);
  }

private:
  std::string compare(const BoolExpr::Compare& c) const {
    if (c.op == CmpOp::Eq) {
      if (auto special = special_equality(c.lhs, c.rhs)) return *special;
      if (auto special = special_equality(c.rhs, c.lhs)) return *special;
    }
    static const char* const ops[] = {" = ", " != ", " < ", " <= ", " > ", " >= "};
    return "(" + term(c.lhs) + ops[static_cast<int>(c.op)] + term(c.rhs) + ")";
  }

  /// Bit-vector predicates for the shapes the generated code uses verbatim.
  std::optional<std::string> special_equality(const ExprPtr& lhs, const ExprPtr& rhs) const {
    const auto* st = std::get_if<Expr::State>(&lhs->node);
    if (st != nullptr) {
      const unsigned w = m_.state.width_of(st->key).value_or(1);
      const std::string ref = sig_name(st->key) + ".val";
      // field = constant
      if (const auto* lit = std::get_if<Expr::Literal>(&rhs->node)) {
        if (lit->value > BitVecValue::mask(w)) return std::nullopt;
        return "bitVecFromBits" + std::to_string(w) + "[" + bit_list(lit->value, w) + ", " + ref +
               (st->primed ? "'" : "") + "]";
      }
      // field' = field + constant
      if (const auto* bin = std::get_if<Expr::Binary>(&rhs->node); bin != nullptr && st->primed &&
                                                                     bin->op == ArithOp::Add) {
        const auto* base = std::get_if<Expr::State>(&bin->lhs->node);
        const auto* lit = std::get_if<Expr::Literal>(&bin->rhs->node);
        if (base != nullptr && lit != nullptr && !base->primed && base->key == st->key) {
          return "addBitsToVec" + std::to_string(w) + "[" + bit_list(lit->value, w) + ", " + ref + "]";
        }
      }
    }
    // time' = time + constant
    if (const auto* t = std::get_if<Expr::Time>(&lhs->node); t != nullptr && t->primed) {
      if (const auto* bin = std::get_if<Expr::Binary>(&rhs->node); bin != nullptr && bin->op == ArithOp::Add) {
        const auto* base = std::get_if<Expr::Time>(&bin->lhs->node);
        const auto* lit = std::get_if<Expr::Literal>(&bin->rhs->node);
        if (base != nullptr && lit != nullptr && !base->primed) {
          return "(TimingRecord.time' = add[TimingRecord.time, " + std::to_string(lit->value) + "])";
        }
      }
    }
    return std::nullopt;
  }

  const Model& m_;
  std::string self_var_;
  const EventSpec* self_spec_;
};

/// Constraint that `target'` takes `value`, evaluated in the current step.
std::string next_value(const Model& m, const StateKey& target, const ExprPtr& value, const Translator& tr) {
  const unsigned w = m.state.width_of(target).value_or(1);
  const std::string ref = sig_name(target) + ".val";
  if (const auto* lit = std::get_if<Expr::Literal>(&value->node)) {
    return "bitVecFromBits" + std::to_string(w) + "[" + bit_list(lit->value & BitVecValue::mask(w), w) + ", " +
           ref + "']";
  }
  if (const auto* bin = std::get_if<Expr::Binary>(&value->node); bin != nullptr && bin->op == ArithOp::Add) {
    const auto* base = std::get_if<Expr::State>(&bin->lhs->node);
    const auto* lit = std::get_if<Expr::Literal>(&bin->rhs->node);
    if (base != nullptr && lit != nullptr && base->key == target && !base->primed) {
      return "addBitsToVec" + std::to_string(w) + "[" + bit_list(lit->value & BitVecValue::mask(w), w) + ", " +
             ref + "]";
    }
  }
  return "(val" + std::to_string(w) + "[" + ref + "'] = " + tr.term(value) + ")";
}

}  // namespace

std::uint64_t alloy_time_bound(const Model& model) {
  std::uint64_t max_delay = 0;
  for (const EventSpec& e : model.events) max_delay = std::max(max_delay, e.effective_delay());
  return model.max_steps * (1 + max_delay);
}

AlloyOutput emit_alloy(const Model& m, const AlloyOptions& options) {
  AlloyOutput out;
  const std::string last = std::to_string(m.max_steps - 1);
  const std::string scope = " for " + std::to_string(m.max_steps) + " steps, " + std::to_string(m.int_width) + " Int";
  const std::vector<FieldInfo> fields = m.fields();

  std::ostringstream os;
  os << "open " << options.bitvector_lib << " as bv\n";

  const std::uint64_t bound = alloy_time_bound(m);
  const bool narrow = m.int_width < 63 && (std::uint64_t{1} << m.int_width) <= bound;
  if (narrow) {
    const std::string msg = "IntWidth " + std::to_string(m.int_width) + " cannot represent time values up to " +
                            std::to_string(bound) + " (max_steps x (1 + max delay)); Alloy integers will wrap";
    out.diagnostics.push_back({Severity::Warning, msg, {m.source, 0, 0, 0}});
    os << "-- WARNING: " << msg << "\n";
  }

  // Signatures.
  os << "-- Module and Signature Definitions\n";
  for (const EventSpec& e : m.events) {
    os << "sig " << e.name << " {\n"
       << "var status: Int, var appearance_time: Int, var delay: Int, var event_id: Int, var reason: Int, "
          "var parent_id: Int";
    for (const DataField& f : e.carried_data) {
      os << ", var d_" << f.name << ": BitVec" << f.width;
    }
    os << " }\n";
  }
  for (const FieldInfo& f : fields) {
    os << "one sig " << sig_name(f.key) << " {var val:BitVec" << f.width << "}\n";
  }
  os << "one sig TimingRecord{var time: Int}\n";
  os << "one sig StepRecord{var step: Int}\n";

  // Step and time advancement.
  os << "-- Timing and Steps\n"
     << "fact{always{\n"
     << " StepRecord.step < " << last << " => {\n"
     << "   StepRecord.step' = add[StepRecord.step,1]\n"
     << "   TimingRecord.time' > TimingRecord.time }}}\n";

  // Initial state.
  os << "-- Initial State\n";
  std::vector<std::string> init;
  for (const EventSpec& e : m.events) {
    if (e.present_at_start) init.push_back("(one e: " + e.name + " | e.status >= 1)");
  }
  const Translator top(m);
  for (const InitialConstraint& c : m.initial_constraints) {
    for (const BoolPtr& conj : conjuncts(c.expr)) init.push_back(top.formula(conj));
  }
  init.push_back("StepRecord.step = 0");
  init.push_back("TimingRecord.time = 0");
  os << "fact{";
  for (std::size_t i = 0; i < init.size(); ++i) os << (i == 0 ? "" : " and ") << init[i];
  os << "\n";
  for (const EventSpec& e : m.events) {
    if (e.present_at_start) {
      os << "     all e:" << e.name << " | e.status >= 1 => (e.appearance_time=0 and e.delay = 0)\n";
      os << "     all e:" << e.name << " | e.status >= 1 => (e.reason = -1 and e.parent_id = -1)\n";
    } else {
      os << "     all e:" << e.name << " | e.status = 0\n";
    }
  }
  os << "}\n";

  // Range and uniqueness.
  std::string all_events;
  for (const EventSpec& e : m.events) all_events += (all_events.empty() ? "" : " + ") + e.name;
  os << "-- Range and uniqueness constraints\n"
     << "fact{always{\n"
     << "  -- Unique event ID constraint\n"
     << "  all disj a, b: " << all_events << " | a.status >= 1 and b.status >= 1 => a.event_id != b.event_id\n"
     << "  -- Event ID, Parent ID range constraint\n";
  for (const EventSpec& e : m.events) {
    os << "  all e: " << e.name << " | e.event_id >= 0 and e.parent_id >= -1 and e.reason >= -1\n";
  }
  os << "  -- Status field range constraint\n";
  for (const EventSpec& e : m.events) {
    os << "  all e: " << e.name << " | e.status in 0 + 1 + 2\n";
  }
  os << "  -- Event instance counts constraint\n";
  for (const EventSpec& e : m.events) {
    os << "  #{e: " << e.name << " | e.status >= 1} <= " << m.cap_of(e.name) << "\n";
  }
  os << "  -- Tie bitvectors to machine state\n";
  for (const FieldInfo& f : fields) {
    os << "  one " << sig_name(f.key) << ".val\n";
  }
  os << "}}\n";

  // Lifecycle.
  os << "-- Lifecycle constraints\n"
     << "fact{always{\n"
     << "StepRecord.step < " << last << " => {\n";
  os << "  -- Deployment\n";
  for (const EventSpec& parent : m.events) {
    const Translator tr(m, "p", &parent);
    for (std::size_t ci = 0; ci < parent.triggers.size(); ++ci) {
      const TriggerClause& c = parent.triggers[ci];
      const EventSpec* child = m.find_event(c.target);
      if (child == nullptr) continue;
      os << "  all p: " << parent.name << " | (p.status = 2 and " << tr.formula(c.condition) << ") => (one c: "
         << child->name << " | c.status = 0 and c.status' >= 1 and c.parent_id' = p.event_id and c.reason' = " << ci
         << " and c.appearance_time' = TimingRecord.time' and c.delay' = " << child->effective_delay();
      for (const DataField& f : child->carried_data) {
        auto a = c.assignments.find(f.name);
        if (a == c.assignments.end()) {
          os << " and bitVecFromBits" << f.width << "[" << bit_list(0, f.width) << ", c.d_" << f.name << "']";
        } else {
          os << " and (val" << f.width << "[c.d_" << f.name << "'] = " << tr.term(a->second) << ")";
        }
      }
      os << ")\n";
    }
  }
  os << "  -- Maintenance\n";
  for (const EventSpec& e : m.events) {
    os << "  all e: " << e.name << " | e.status = 1 => ((add[e.appearance_time, e.delay] <= TimingRecord.time' "
       << "=> e.status' = 2 else e.status' = 1) and e.appearance_time' = e.appearance_time and e.delay' = e.delay "
       << "and e.event_id' = e.event_id and e.parent_id' = e.parent_id and e.reason' = e.reason)\n";
  }
  os << "  -- State updates\n";
  for (const FieldInfo& f : fields) {
    std::vector<std::string> writers;
    for (const EventSpec& e : m.events) {
      const Translator tr(m, "p", &e);
      for (const StateChangeClause& sc : e.state_changes) {
        if (sc.target != f.key) continue;
        writers.push_back("(some p: " + e.name + " | p.status = 2 and " + tr.formula(sc.condition) + " and " +
                          next_value(m, f.key, sc.value, tr) + ")");
      }
    }
    const std::string ref = sig_name(f.key) + ".val";
    if (writers.empty()) {
      os << "  " << ref << "' = " << ref << "\n";
      continue;
    }
    os << "  ";
    for (std::size_t i = 0; i < writers.size(); ++i) os << (i == 0 ? "(" : " or ") << writers[i];
    os << ") or (";
    bool first = true;
    for (const EventSpec& e : m.events) {
      const Translator tr(m, "p", &e);
      for (const StateChangeClause& sc : e.state_changes) {
        if (sc.target != f.key) continue;
        os << (first ? "" : " and ") << "(no p: " << e.name << " | p.status = 2 and " << tr.formula(sc.condition)
           << ")";
        first = false;
      }
    }
    os << " and " << ref << "' = " << ref << ")\n";
  }
  os << "  -- Completion\n";
  for (const EventSpec& e : m.events) {
    os << "  all e: " << e.name << " | e.status = 2 => e.status' = 0\n";
  }
  os << "}}}\n";

  // Assertions and commands.
  os << "-- Assertions to check\n";
  for (const Assertion& a : m.assertions) {
    os << "assert " << a.name << " {\n";
    if (a.mode == AssertionMode::Always) {
      os << "    always {StepRecord.step < " << last << " => " << top.formula(a.body) << "}\n";
    } else {
      os << "    always {StepRecord.step = " << last << " => " << top.formula(a.body) << "}\n";
    }
    os << "}\n";
  }
  os << "run {}" << scope << "\n";
  for (const Assertion& a : m.assertions) {
    os << "check " << a.name << scope << "\n";
  }
  out.text = os.str();
  return out;
}

}  // namespace maestro
