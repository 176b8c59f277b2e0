#include "maestro/ast.hpp"

#include <algorithm>
#include <set>

namespace maestro {

std::string SourceSpan::str() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (!known()) {
    return out;
  }
  out += ":" + std::to_string(line) + ":" + std::to_string(column_begin);
  if (column_end > column_begin) {
    out += "-" + std::to_string(column_end);
  }
  return out;
}

std::string Diagnostic::str() const {
  return span.str() + ": " + (severity == Severity::Error ? "error: " : "warning: ") + message;
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) {
    return true;
  }
  if (!a || !b) {
    return false;
  }
  return *a == *b;
}

bool same(const BoolPtr& a, const BoolPtr& b) {
  if (a == b) {
    return true;
  }
  if (!a || !b) {
    return false;
  }
  return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) {
    return false;
  }
  return std::visit(
      overloaded{
          [&](const Expr::Literal& x) { return x.value == std::get<Expr::Literal>(b.node).value; },
          [&](const Expr::State& x) {
            const auto& y = std::get<Expr::State>(b.node);
            return x.key == y.key && x.primed == y.primed;
          },
          [&](const Expr::Data& x) { return x.field == std::get<Expr::Data>(b.node).field; },
          [&](const Expr::Time& x) { return x.primed == std::get<Expr::Time>(b.node).primed; },
          [&](const Expr::Count& x) {
            const auto& y = std::get<Expr::Count>(b.node);
            return x.event == y.event && x.primed == y.primed;
          },
          [&](const Expr::Binary& x) {
            const auto& y = std::get<Expr::Binary>(b.node);
            return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
      },
      a.node);
}

bool operator==(const BoolExpr& a, const BoolExpr& b) {
  if (a.node.index() != b.node.index()) {
    return false;
  }
  return std::visit(
      overloaded{
          [&](const BoolExpr::Const& x) { return x.value == std::get<BoolExpr::Const>(b.node).value; },
          [&](const BoolExpr::Compare& x) {
            const auto& y = std::get<BoolExpr::Compare>(b.node);
            return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
          [&](const BoolExpr::Not& x) { return same(x.operand, std::get<BoolExpr::Not>(b.node).operand); },
          [&](const BoolExpr::Join& x) {
            const auto& y = std::get<BoolExpr::Join>(b.node);
            return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
          },
      },
      a.node);
}

bool operator==(const TriggerClause& a, const TriggerClause& b) {
  if (a.target != b.target || !same(a.condition, b.condition) ||
      a.assignments.size() != b.assignments.size()) {
    return false;
  }
  return std::equal(a.assignments.begin(), a.assignments.end(), b.assignments.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first && same(x.second, y.second); });
}

bool operator==(const StateChangeClause& a, const StateChangeClause& b) {
  return a.target == b.target && same(a.condition, b.condition) && same(a.value, b.value);
}

bool operator==(const EventSpec& a, const EventSpec& b) {
  return a.name == b.name && a.carried_data == b.carried_data && a.triggers == b.triggers &&
         a.state_changes == b.state_changes && a.delay == b.delay &&
         a.present_at_start == b.present_at_start;
}

bool operator==(const Assertion& a, const Assertion& b) {
  return a.name == b.name && a.mode == b.mode && same(a.body, b.body);
}

bool operator==(const Model& a, const Model& b) {
  if (!(a.state == b.state && a.events == b.events && a.assertions == b.assertions &&
        a.initial_constraints == b.initial_constraints && a.max_steps == b.max_steps &&
        a.int_width == b.int_width)) {
    return false;
  }
  // Caps compare by effective value so an explicit default equals an omitted one.
  std::set<std::string> names;
  for (const auto& [k, v] : a.instance_caps) names.insert(k);
  for (const auto& [k, v] : b.instance_caps) names.insert(k);
  return std::all_of(names.begin(), names.end(),
                     [&](const std::string& n) { return a.cap_of(n) == b.cap_of(n); });
}

// ---------------------------------------------------------------------------
// Builders

ExprPtr make_literal(std::uint64_t value) {
  return std::make_shared<const Expr>(Expr{Expr::Literal{value}});
}
ExprPtr make_state(StateKey key, bool primed) {
  return std::make_shared<const Expr>(Expr{Expr::State{std::move(key), primed}});
}
ExprPtr make_data(std::string field) {
  return std::make_shared<const Expr>(Expr{Expr::Data{std::move(field)}});
}
ExprPtr make_time(bool primed) { return std::make_shared<const Expr>(Expr{Expr::Time{primed}}); }
ExprPtr make_count(std::string event, bool primed) {
  return std::make_shared<const Expr>(Expr{Expr::Count{std::move(event), primed}});
}
ExprPtr make_binary(ArithOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Expr::Binary{op, std::move(lhs), std::move(rhs)}});
}

BoolPtr make_const(bool value) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Const{value}});
}
BoolPtr make_compare(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Compare{op, std::move(lhs), std::move(rhs)}});
}
BoolPtr make_not(BoolPtr operand) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Not{std::move(operand)}});
}
BoolPtr make_join(Junction op, BoolPtr lhs, BoolPtr rhs) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Join{op, std::move(lhs), std::move(rhs)}});
}
BoolPtr make_and(BoolPtr lhs, BoolPtr rhs) { return make_join(Junction::And, std::move(lhs), std::move(rhs)); }
BoolPtr make_or(BoolPtr lhs, BoolPtr rhs) { return make_join(Junction::Or, std::move(lhs), std::move(rhs)); }

bool is_true_const(const BoolPtr& b) {
  const auto* c = b ? std::get_if<BoolExpr::Const>(&b->node) : nullptr;
  return c != nullptr && c->value;
}

// ---------------------------------------------------------------------------
// Traversal

ExprPtr rewrite(const ExprPtr& e, const RefRewriter& rw) {
  if (!e) {
    return e;
  }
  return std::visit(
      overloaded{
          [&](const Expr::State& x) -> ExprPtr {
            return rw.state ? make_state(rw.state(x.key), x.primed) : e;
          },
          [&](const Expr::Count& x) -> ExprPtr {
            return rw.event ? make_count(rw.event(x.event), x.primed) : e;
          },
          [&](const Expr::Binary& x) -> ExprPtr {
            return make_binary(x.op, rewrite(x.lhs, rw), rewrite(x.rhs, rw));
          },
          [&](const auto&) -> ExprPtr { return e; },
      },
      e->node);
}

BoolPtr rewrite(const BoolPtr& b, const RefRewriter& rw) {
  if (!b) {
    return b;
  }
  return std::visit(
      overloaded{
          [&](const BoolExpr::Const&) -> BoolPtr { return b; },
          [&](const BoolExpr::Compare& x) -> BoolPtr {
            return make_compare(x.op, rewrite(x.lhs, rw), rewrite(x.rhs, rw));
          },
          [&](const BoolExpr::Not& x) -> BoolPtr { return make_not(rewrite(x.operand, rw)); },
          [&](const BoolExpr::Join& x) -> BoolPtr {
            return make_join(x.op, rewrite(x.lhs, rw), rewrite(x.rhs, rw));
          },
      },
      b->node);
}

void visit_refs(const ExprPtr& e, const RefVisitor& v) {
  if (!e) {
    return;
  }
  std::visit(overloaded{
                 [&](const Expr::Literal&) {},
                 [&](const Expr::State& x) { if (v.state) v.state(x); },
                 [&](const Expr::Data& x) { if (v.data) v.data(x); },
                 [&](const Expr::Time& x) { if (v.time) v.time(x); },
                 [&](const Expr::Count& x) { if (v.count) v.count(x); },
                 [&](const Expr::Binary& x) {
                   visit_refs(x.lhs, v);
                   visit_refs(x.rhs, v);
                 },
             },
             e->node);
}

void visit_refs(const BoolPtr& b, const RefVisitor& v) {
  if (!b) {
    return;
  }
  std::visit(overloaded{
                 [&](const BoolExpr::Const&) {},
                 [&](const BoolExpr::Compare& x) {
                   visit_refs(x.lhs, v);
                   visit_refs(x.rhs, v);
                 },
                 [&](const BoolExpr::Not& x) { visit_refs(x.operand, v); },
                 [&](const BoolExpr::Join& x) {
                   visit_refs(x.lhs, v);
                   visit_refs(x.rhs, v);
                 },
             },
             b->node);
}

bool has_primed(const BoolPtr& b) {
  bool primed = false;
  visit_refs(b, RefVisitor{
                    .state = [&](const Expr::State& s) { primed = primed || s.primed; },
                    .data = {},
                    .time = [&](const Expr::Time& t) { primed = primed || t.primed; },
                    .count = [&](const Expr::Count& c) { primed = primed || c.primed; },
                });
  return primed;
}

std::vector<BoolPtr> conjuncts(const BoolPtr& b) {
  std::vector<BoolPtr> out;
  std::vector<BoolPtr> stack{b};
  while (!stack.empty()) {
    BoolPtr cur = stack.back();
    stack.pop_back();
    if (const auto* j = std::get_if<BoolExpr::Join>(&cur->node); j && j->op == Junction::And) {
      stack.push_back(j->rhs);
      stack.push_back(j->lhs);
    } else {
      out.push_back(cur);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lookups

const TypeSpec* StateDecl::find_type(const std::string& name) const {
  auto it = std::find_if(types.begin(), types.end(), [&](const TypeSpec& t) { return t.name == name; });
  return it == types.end() ? nullptr : &*it;
}

const InstanceSpec* StateDecl::find_instance(const std::string& name) const {
  auto it = std::find_if(instances.begin(), instances.end(),
                         [&](const InstanceSpec& i) { return i.name == name; });
  return it == instances.end() ? nullptr : &*it;
}

std::optional<unsigned> StateDecl::width_of(const StateKey& key) const {
  const InstanceSpec* inst = find_instance(key.instance);
  if (inst == nullptr) {
    return std::nullopt;
  }
  const TypeSpec* type = find_type(inst->type);
  if (type == nullptr) {
    return std::nullopt;
  }
  for (const DataField& f : type->fields) {
    if (f.name == key.field) {
      return f.width;
    }
  }
  return std::nullopt;
}

const DataField* EventSpec::find_data(const std::string& field) const {
  auto it = std::find_if(carried_data.begin(), carried_data.end(),
                         [&](const DataField& d) { return d.name == field; });
  return it == carried_data.end() ? nullptr : &*it;
}

const EventSpec* Model::find_event(const std::string& name) const {
  auto it = std::find_if(events.begin(), events.end(), [&](const EventSpec& e) { return e.name == name; });
  return it == events.end() ? nullptr : &*it;
}

unsigned Model::cap_of(const std::string& event) const {
  auto it = instance_caps.find(event);
  return it == instance_caps.end() ? kDefaultMaxInstances : it->second;
}

std::vector<FieldInfo> Model::fields() const {
  std::vector<FieldInfo> out;
  for (const InstanceSpec& inst : state.instances) {
    const TypeSpec* type = state.find_type(inst.type);
    if (type == nullptr) {
      continue;
    }
    for (const DataField& f : type->fields) {
      out.push_back({{inst.name, f.name}, f.width});
    }
  }
  return out;
}

const char* to_string(InstanceStatus s) noexcept {
  switch (s) {
    case InstanceStatus::Undeployed: return "Undeployed";
    case InstanceStatus::Pending: return "Pending";
    case InstanceStatus::Active: return "Active";
  }
  return "?";
}

std::optional<std::size_t> Trace::field_index(const StateKey& key) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].key == key) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace maestro
