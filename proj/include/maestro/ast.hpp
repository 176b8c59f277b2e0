#pragma once

// Domain types shared by the parser, engine, checker, Integra and the Alloy emitter.
// Every type here is an immutable value once built; expression trees share
// structure through shared_ptr<const ...>.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maestro/bitvec.hpp"

namespace maestro {

struct SourceSpan {
  std::string file;
  int line = 0;  // 0 = unknown (synthesised by a transform)
  int column_begin = 0;
  int column_end = 0;

  [[nodiscard]] bool known() const noexcept { return line >= 1; }
  [[nodiscard]] std::string str() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  [[nodiscard]] std::string str() const;
};

/// instance.field
struct StateKey {
  std::string instance;
  std::string field;

  [[nodiscard]] std::string str() const { return instance + "." + field; }
  friend auto operator<=>(const StateKey&, const StateKey&) = default;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
struct BoolExpr;
using ExprPtr = std::shared_ptr<const Expr>;
using BoolPtr = std::shared_ptr<const BoolExpr>;

enum class ArithOp { Add, Sub };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class Junction { And, Or };

struct Expr {
  struct Literal {
    std::uint64_t value = 0;
  };
  struct State {
    StateKey key;
    bool primed = false;
  };
  /// `self.<field>`: carried data of the evaluating event instance.
  struct Data {
    std::string field;
  };
  struct Time {
    bool primed = false;
  };
  /// `#Event`: number of deployed (pending or active) instances of a spec.
  struct Count {
    std::string event;
    bool primed = false;
  };
  struct Binary {
    ArithOp op = ArithOp::Add;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<Literal, State, Data, Time, Count, Binary> node;
};

struct BoolExpr {
  struct Const {
    bool value = true;
  };
  struct Compare {
    CmpOp op = CmpOp::Eq;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Not {
    BoolPtr operand;
  };
  struct Join {
    Junction op = Junction::And;
    BoolPtr lhs;
    BoolPtr rhs;
  };

  std::variant<Const, Compare, Not, Join> node;
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const BoolExpr& a, const BoolExpr& b);
bool same(const ExprPtr& a, const ExprPtr& b);
bool same(const BoolPtr& a, const BoolPtr& b);

ExprPtr make_literal(std::uint64_t value);
ExprPtr make_state(StateKey key, bool primed = false);
ExprPtr make_data(std::string field);
ExprPtr make_time(bool primed = false);
ExprPtr make_count(std::string event, bool primed = false);
ExprPtr make_binary(ArithOp op, ExprPtr lhs, ExprPtr rhs);

BoolPtr make_const(bool value);
BoolPtr make_compare(CmpOp op, ExprPtr lhs, ExprPtr rhs);
BoolPtr make_not(BoolPtr operand);
BoolPtr make_join(Junction op, BoolPtr lhs, BoolPtr rhs);
BoolPtr make_and(BoolPtr lhs, BoolPtr rhs);
BoolPtr make_or(BoolPtr lhs, BoolPtr rhs);

[[nodiscard]] bool is_true_const(const BoolPtr& b);

/// Renaming hooks used by the NI duplication and by reference scans.
struct RefRewriter {
  std::function<StateKey(const StateKey&)> state;
  std::function<std::string(const std::string&)> event;
};

ExprPtr rewrite(const ExprPtr& e, const RefRewriter& rw);
BoolPtr rewrite(const BoolPtr& b, const RefRewriter& rw);

struct RefVisitor {
  std::function<void(const Expr::State&)> state;
  std::function<void(const Expr::Data&)> data;
  std::function<void(const Expr::Time&)> time;
  std::function<void(const Expr::Count&)> count;
};

void visit_refs(const ExprPtr& e, const RefVisitor& v);
void visit_refs(const BoolPtr& b, const RefVisitor& v);

[[nodiscard]] bool has_primed(const BoolPtr& b);

/// Top-level conjuncts (`a and (b and c)` -> a, b, c).
[[nodiscard]] std::vector<BoolPtr> conjuncts(const BoolPtr& b);

// ---------------------------------------------------------------------------
// Model

struct DataField {
  std::string name;
  unsigned width = 1;
  friend bool operator==(const DataField&, const DataField&) = default;
};

struct TypeSpec {
  std::string name;
  std::vector<DataField> fields;
  SourceSpan span;
  friend bool operator==(const TypeSpec& a, const TypeSpec& b) {
    return a.name == b.name && a.fields == b.fields;
  }
};

struct InstanceSpec {
  std::string name;
  std::string type;
  SourceSpan span;
  friend bool operator==(const InstanceSpec& a, const InstanceSpec& b) {
    return a.name == b.name && a.type == b.type;
  }
};

struct StateDecl {
  std::vector<TypeSpec> types;
  std::vector<InstanceSpec> instances;

  [[nodiscard]] const TypeSpec* find_type(const std::string& name) const;
  [[nodiscard]] const InstanceSpec* find_instance(const std::string& name) const;
  /// Width of instance.field, if it resolves.
  [[nodiscard]] std::optional<unsigned> width_of(const StateKey& key) const;
  friend bool operator==(const StateDecl&, const StateDecl&) = default;
};

struct TriggerClause {
  BoolPtr condition = make_const(true);
  std::string target;
  std::map<std::string, ExprPtr> assignments;
  SourceSpan span;
  friend bool operator==(const TriggerClause& a, const TriggerClause& b);
};

struct StateChangeClause {
  BoolPtr condition = make_const(true);
  StateKey target;
  ExprPtr value;
  SourceSpan span;
  friend bool operator==(const StateChangeClause& a, const StateChangeClause& b);
};

struct EventSpec {
  std::string name;
  std::vector<DataField> carried_data;
  std::vector<TriggerClause> triggers;
  std::vector<StateChangeClause> state_changes;
  std::uint64_t delay = 0;
  bool present_at_start = false;
  SourceSpan span;

  /// Present-at-start instances always start with zero delay.
  [[nodiscard]] std::uint64_t effective_delay() const noexcept {
    return present_at_start ? 0 : delay;
  }
  [[nodiscard]] const DataField* find_data(const std::string& field) const;
  friend bool operator==(const EventSpec& a, const EventSpec& b);
};

enum class AssertionMode { Always, Finally };

struct Assertion {
  std::string name;
  AssertionMode mode = AssertionMode::Always;
  BoolPtr body;
  SourceSpan span;
  friend bool operator==(const Assertion& a, const Assertion& b);
};

struct InitialConstraint {
  std::string name;  // label only; not part of structural equality
  BoolPtr expr;
  SourceSpan span;
  friend bool operator==(const InitialConstraint& a, const InitialConstraint& b) {
    return same(a.expr, b.expr);
  }
};

inline constexpr unsigned kDefaultMaxInstances = 8;

struct FieldInfo {
  StateKey key;
  unsigned width = 1;
  friend bool operator==(const FieldInfo&, const FieldInfo&) = default;
};

struct Model {
  StateDecl state;
  std::vector<EventSpec> events;
  std::vector<Assertion> assertions;
  std::vector<InitialConstraint> initial_constraints;
  std::uint64_t max_steps = 1;
  unsigned int_width = 1;
  std::map<std::string, unsigned> instance_caps;
  std::string source;  // file name, for diagnostics

  [[nodiscard]] const EventSpec* find_event(const std::string& name) const;
  [[nodiscard]] unsigned cap_of(const std::string& event) const;
  /// All instance fields in declaration order (instance order, then type field order).
  [[nodiscard]] std::vector<FieldInfo> fields() const;

  friend bool operator==(const Model& a, const Model& b);
};

// ---------------------------------------------------------------------------
// Runtime

enum class InstanceStatus { Undeployed = 0, Pending = 1, Active = 2 };

[[nodiscard]] const char* to_string(InstanceStatus s) noexcept;

struct EventInstance {
  std::string spec;
  InstanceStatus status = InstanceStatus::Undeployed;
  std::uint64_t appearance_time = 0;
  std::uint64_t delay = 0;
  std::int64_t event_id = 0;
  int reason = -1;
  std::int64_t parent_id = -1;
  std::map<std::string, BitVecValue> data;

  friend bool operator==(const EventInstance&, const EventInstance&) = default;
};

/// Values aligned with Model::fields().
using Assignment = std::vector<BitVecValue>;

struct StepRecord {
  std::uint64_t step_index = 0;
  std::uint64_t time = 0;
  std::vector<BitVecValue> state;
  std::vector<EventInstance> instances;
  /// True when the predecessor step was quiescent (no active, no pending).
  bool stutter = false;
  /// Id the next deployed instance receives; ids are never reused in a trace.
  std::int64_t next_event_id = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trace {
  std::vector<FieldInfo> fields;
  std::vector<StepRecord> steps;
  bool terminated_early = false;
  Assignment initial_assignment;

  [[nodiscard]] std::optional<std::size_t> field_index(const StateKey& key) const;
  friend bool operator==(const Trace&, const Trace&) = default;
};

}  // namespace maestro
