#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "maestro/ast.hpp"
#include "maestro/eval.hpp"

namespace maestro {

struct EngineConfig {
  std::uint64_t max_steps = 1;
  /// Pad quiescent executions with stutter steps up to max_steps.
  bool stutter_to_max = true;

  static EngineConfig from(const Model& m) { return {m.max_steps, true}; }
};

class EngineError : public std::runtime_error {
public:
  enum class Kind { ConstraintViolated, IncompleteAssignment, WriteConflict, InstanceOverflow };

  EngineError(Kind kind, const std::string& message, std::uint64_t step = 0)
      : std::runtime_error(message), kind_(kind), step_(step) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// Step whose successor could not be built (0 for initial-state errors).
  [[nodiscard]] std::uint64_t step() const noexcept { return step_; }

private:
  Kind kind_;
  std::uint64_t step_;
};

[[nodiscard]] const char* to_string(EngineError::Kind k) noexcept;

/// Step 0 for a complete assignment aligned with Model::fields().
[[nodiscard]] StepRecord initial_step(const Model& model, const Assignment& assignment);

/// Same, keyed by field; every declared field must be present.
[[nodiscard]] StepRecord initial_step(const Model& model, const std::map<StateKey, BitVecValue>& assignment);

/// Applies trigger evaluation, state updates, completion, maintenance and the
/// minimal time advance to produce step x+1.
[[nodiscard]] StepRecord step(const Model& model, const StepRecord& current);

[[nodiscard]] Trace run_trace(const Model& model, const Assignment& assignment,
                              const EngineConfig& config);
[[nodiscard]] inline Trace run_trace(const Model& model, const Assignment& assignment) {
  return run_trace(model, assignment, EngineConfig::from(model));
}

/// True when no instance is pending or active.
[[nodiscard]] bool is_quiescent(const StepRecord& s);

/// Steps that are not stutter padding.
[[nodiscard]] std::uint64_t non_stutter_steps(const Trace& t);

/// Converts a keyed assignment into field order; missing fields raise IncompleteAssignment.
[[nodiscard]] Assignment to_assignment(const Model& model, const std::map<StateKey, BitVecValue>& values);

}  // namespace maestro
