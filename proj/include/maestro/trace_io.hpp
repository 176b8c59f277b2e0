#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "maestro/ast.hpp"

namespace maestro {

/// Line-oriented form: one `step i time t` header per step followed by state
/// bindings and instances as `(spec, id, status, parent, reason, data)`.
[[nodiscard]] std::string trace_to_text(const Trace& t);

[[nodiscard]] nlohmann::json trace_to_json(const Trace& t);

/// Indented forest of instances by parent edge, with appearance and
/// activation times. `highlight_step` marks instances alive at that step.
[[nodiscard]] std::string render_event_tree(const Trace& t, std::optional<std::uint64_t> highlight_step = std::nullopt);

/// Every instance seen in the trace, keyed by id, with the step it was
/// first deployed, the time it first became active and the time it completed.
struct InstanceHistory {
  EventInstance instance;
  std::uint64_t first_step = 0;
  std::optional<std::uint64_t> active_time;
  std::optional<std::uint64_t> active_step;
};
[[nodiscard]] std::vector<InstanceHistory> instance_histories(const Trace& t);

[[nodiscard]] std::string format_value(const BitVecValue& v);

}  // namespace maestro
