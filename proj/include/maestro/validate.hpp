#pragma once

#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

/// Checks every Model invariant. Returns one diagnostic per violation; an
/// empty list means the model is well formed. Warnings (e.g. a present-at-start
/// event with a nonzero delay) do not make a model unusable.
[[nodiscard]] std::vector<Diagnostic> validate(const Model& model);

[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace maestro
