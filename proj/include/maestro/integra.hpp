#pragma once

// Integra: additive transforms over Maestro models.
//
// File format, one directive per line; a `#` at line start or a `# ` after
// whitespace starts a comment. Arguments are split on commas outside quotes,
// braces and parentheses; the last argument of a directive takes the rest of
// the line.
//
//   ADD_EVENT          Name, "CarriesData", "TriggersEvent", "StateChanges", delay, Yes|No[, max_instances]
//   ADD_DATA_FIELD     Event, field, width
//   ADD_TRIGGER        Event, [IF cond :] Trigger Target{...}
//   GUARD_AND          Event, cond
//   GUARD_OR           Event, cond
//   ADD_STATE_CHANGE   Event, [IF cond :] SC inst.field <- expr
//   ADD_DELAY          Event, amount
//   ADD_TYPE           Name, field: BV[w], ...
//   ADD_INSTANCE       name, Type
//   ADD_ASSERTION      Name, ALWAYS|FINALLY body
//   ADD_INITIAL        cond
//   DUPLICATE_STATE_NI  m1, m2
//   DUPLICATE_EVENTS_NI m1, m2
//   SECRET_FREE        inst.field
//   OBSERVABLE_EQUAL   inst.field

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

enum class TransformKind {
  AddEventSpec,
  AddDataField,
  AddTriggerClause,
  GuardConditionsAnd,
  GuardConditionsOr,
  AddStateChange,
  AddDelay,
  AddTypeSpec,
  AddInstance,
  AddAssertion,
  AddInitialConstraint,
  DuplicateStateForNI,
  DuplicateEventsForNI,
  SecretFree,
  ObservableEqual,
};

[[nodiscard]] const char* directive_name(TransformKind k) noexcept;

struct Transform {
  struct AddEventSpec {
    EventSpec event;
    std::optional<unsigned> max_instances;
  };
  struct AddDataField {
    std::string event;
    DataField field;
  };
  struct AddTriggerClause {
    std::string event;
    TriggerClause clause;
  };
  struct Guard {
    std::string event;
    BoolPtr condition;
  };
  struct AddStateChange {
    std::string event;
    StateChangeClause clause;
  };
  struct AddDelay {
    std::string event;
    std::uint64_t amount = 0;
  };
  struct AddTypeSpec {
    TypeSpec type;
  };
  struct AddInstance {
    InstanceSpec instance;
  };
  struct AddAssertion {
    Assertion assertion;
  };
  struct AddInitialConstraint {
    BoolPtr expr;
  };
  struct Duplicate {
    std::string first_suffix;
    std::string second_suffix;
  };
  struct FieldRef {
    StateKey field;
  };

  TransformKind kind = TransformKind::AddDelay;
  std::variant<AddEventSpec, AddDataField, AddTriggerClause, Guard, AddStateChange, AddDelay, AddTypeSpec,
               AddInstance, AddAssertion, AddInitialConstraint, Duplicate, FieldRef>
      body;
  SourceSpan span;

  /// Name the transform acts on (event, type, instance, assertion or field).
  [[nodiscard]] std::string target() const;
  /// Canonical directive line; parse_integra() reads it back.
  [[nodiscard]] std::string directive() const;

  /// Structural equality: same kind and same canonical directive.
  friend bool operator==(const Transform& a, const Transform& b) {
    return a.kind == b.kind && a.directive() == b.directive();
  }
};

struct TransformProgram {
  std::string name;
  std::vector<Transform> transforms;

  /// Number of directive lines.
  [[nodiscard]] std::size_t loc() const noexcept { return transforms.size(); }
  friend bool operator==(const TransformProgram& a, const TransformProgram& b) {
    return a.transforms == b.transforms;
  }
};

class IntegraError : public std::runtime_error {
public:
  enum class Kind { Syntax, ANDORConflict, Conflict, UnresolvedReference, InvalidResult };
  IntegraError(Kind kind, const std::string& message, SourceSpan span = {},
               std::vector<Diagnostic> diagnostics = {});
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const SourceSpan& span() const noexcept { return span_; }
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
  Kind kind_;
  SourceSpan span_;
  std::vector<Diagnostic> diagnostics_;
};

[[nodiscard]] TransformProgram parse_integra(std::string_view text, const std::string& file = {});
[[nodiscard]] TransformProgram load_integra(const std::string& path);
[[nodiscard]] std::string write_integra(const TransformProgram& p);

/// Canonical normal form of the union of `programs`: transforms sorted and
/// deduplicated, delays summed per event, guards folded per event.
[[nodiscard]] TransformProgram compose(const std::vector<TransformProgram>& programs);

/// Applies the canonical form of `program` to `base` and validates the result.
[[nodiscard]] Model apply(const Model& base, const TransformProgram& program);

}  // namespace maestro
