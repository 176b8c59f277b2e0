#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "maestro/ast.hpp"
#include "maestro/engine.hpp"

namespace maestro {

inline constexpr std::uint64_t kDefaultConfigLimit = std::uint64_t{1} << 16;

/// One enumerated initial-state bit.
struct FreeBit {
  StateKey key;
  unsigned bit = 0;  // 0 = least significant
  friend bool operator==(const FreeBit&, const FreeBit&) = default;
};

/// State bits not pinned by a top-level `field = literal` conjunct of an
/// initial constraint, in declaration order with each field's bits MSB first.
[[nodiscard]] std::vector<FreeBit> free_bits(const Model& model);

struct CheckOptions {
  std::uint64_t limit = kDefaultConfigLimit;
  /// Worker threads; results are identical for every value.
  unsigned jobs = 1;
};

enum class Verdict { Holds, Fails };

struct AssertionResult {
  std::string name;
  AssertionMode mode = AssertionMode::Always;
  Verdict verdict = Verdict::Holds;
  /// Admitted configurations the assertion was evaluated on.
  std::uint64_t configs_explored = 0;
  // Set for Fails.
  std::uint64_t failing_step = 0;
  std::uint64_t failing_config = 0;  // enumeration index
  Assignment failing_assignment;
  std::optional<Trace> witness;
};

struct CheckReport {
  std::string model;
  std::vector<FieldInfo> fields;
  std::vector<FreeBit> free;
  std::vector<AssertionResult> results;
  std::uint64_t configs_enumerated = 0;
  std::uint64_t configs_admitted = 0;
  double wall_seconds = 0;

  [[nodiscard]] bool all_hold() const;
  /// No initial assignment satisfied the constraints; every verdict holds trivially.
  [[nodiscard]] bool vacuous() const { return configs_admitted == 0; }
  [[nodiscard]] const AssertionResult* find(const std::string& name) const;
};

class CheckError : public std::runtime_error {
public:
  enum class Kind { EnumerationOverflow, Engine };
  CheckError(Kind kind, const std::string& message, Assignment assignment = {})
      : std::runtime_error(message), kind_(kind), assignment_(std::move(assignment)) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// The initial assignment whose execution failed (Engine errors only).
  [[nodiscard]] const Assignment& assignment() const noexcept { return assignment_; }

private:
  Kind kind_;
  Assignment assignment_;
};

/// Exhaustive bounded check of every assertion over all admitted initial assignments.
[[nodiscard]] CheckReport check(const Model& model, const CheckOptions& options = {});

/// First step at which `a` is violated on `t`, if any. ALWAYS bodies with
/// primed references are evaluated at steps 0..N-2 against the successor
/// step; other ALWAYS bodies at every step; FINALLY at the last step.
[[nodiscard]] std::optional<std::uint64_t> first_violation(const Model& model, const Assertion& a,
                                                           const Trace& t);

/// Assignment for enumeration index `index` (free bits MSB first).
[[nodiscard]] Assignment assignment_for(const Model& model, const std::vector<FreeBit>& free,
                                        std::uint64_t index);

[[nodiscard]] std::string report_to_text(const CheckReport& r, bool include_timing = true);
[[nodiscard]] nlohmann::json report_to_json(const CheckReport& r, bool include_timing = true);

/// Counterexample rendering: the event tree of the first failing witness, or
/// side-by-side trees and a step table for a two-machine product.
[[nodiscard]] std::string explain(const CheckReport& r);

}  // namespace maestro
