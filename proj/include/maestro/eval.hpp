#pragma once

// Expression evaluation shared by the engine and the checker.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

/// `time` and `#Event` evaluate as values of this width.
inline constexpr unsigned kCounterWidth = 32;

/// Field order and lookup for a model's flattened machine state.
class StateLayout {
public:
  StateLayout() = default;
  explicit StateLayout(std::vector<FieldInfo> fields);
  static StateLayout of(const Model& m) { return StateLayout(m.fields()); }

  [[nodiscard]] const std::vector<FieldInfo>& fields() const noexcept { return fields_; }
  [[nodiscard]] std::size_t size() const noexcept { return fields_.size(); }
  [[nodiscard]] std::optional<std::size_t> index(const StateKey& key) const;

private:
  std::vector<FieldInfo> fields_;
  std::map<StateKey, std::size_t> index_;
};

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One step's observable values.
struct EvalFrame {
  const std::vector<BitVecValue>* state = nullptr;
  std::uint64_t time = 0;
  const std::vector<EventInstance>* instances = nullptr;
};

struct EvalContext {
  const StateLayout* layout = nullptr;
  EvalFrame now;
  /// Successor step for primed references; absent outside ALWAYS assertions.
  std::optional<EvalFrame> next;
  /// Carried data of the evaluating instance, if any.
  const std::map<std::string, BitVecValue>* data = nullptr;
};

[[nodiscard]] BitVecValue evaluate(const ExprPtr& e, const EvalContext& ctx);
[[nodiscard]] bool evaluate(const BoolPtr& b, const EvalContext& ctx);

/// Deployed (pending or active) instances of `spec`.
[[nodiscard]] std::uint64_t count_deployed(const std::vector<EventInstance>& instances,
                                           const std::string& spec);

}  // namespace maestro
