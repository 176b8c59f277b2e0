#pragma once

#include <string>
#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

// Canonical text for the embedded grammars. Output always reparses to a
// structurally equal tree: parentheses appear exactly where associativity or
// precedence would otherwise change the parse.

[[nodiscard]] std::string to_string(const ExprPtr& e);
[[nodiscard]] std::string to_string(const BoolPtr& b);
[[nodiscard]] std::string to_string(const TriggerClause& t);
[[nodiscard]] std::string to_string(const StateChangeClause& sc);

/// `None` for an empty list, otherwise clauses joined by "; ".
[[nodiscard]] std::string format_triggers(const std::vector<TriggerClause>& ts);
[[nodiscard]] std::string format_state_changes(const std::vector<StateChangeClause>& scs);
[[nodiscard]] std::string format_carried_data(const std::vector<DataField>& data);
/// `ALWAYS <body>` / `FINALLY <body>`.
[[nodiscard]] std::string format_assertion(const Assertion& a);

/// Serialises a model in the input file format; parse_model() reads it back
/// to a structurally equal Model.
[[nodiscard]] std::string write_model(const Model& m);

}  // namespace maestro
