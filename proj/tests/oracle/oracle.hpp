#pragma once

// Reference semantics written separately from the library's evaluator,
// engine and checker. It shares only the AST and the parser. State is a flat
// array of masked integers; every initial state of the model is enumerated
// (no free-bit analysis) and filtered by the initial constraints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maestro/ast.hpp"

namespace oracle {

struct Value {
  unsigned width = 1;
  std::uint64_t bits = 0;
};

struct Instance {
  std::string spec;
  int status = 0;  // 1 pending, 2 active
  std::uint64_t appear = 0;
  std::uint64_t delay = 0;
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int reason = -1;
  std::vector<std::pair<std::string, Value>> data;
};

struct Step {
  std::uint64_t time = 0;
  std::vector<std::uint64_t> state;
  std::vector<Instance> live;
  bool stutter = false;
};

struct Failure {
  std::uint64_t step = 0;
  std::vector<std::uint64_t> assignment;  // aligned with the model's fields
};

struct Verdict {
  std::string name;
  bool holds = true;
  std::optional<Failure> first;  // lowest assignment in enumeration order
};

struct Result {
  std::vector<Verdict> verdicts;
  std::uint64_t admitted = 0;
  std::uint64_t total = 0;
};

/// Runs the model from `initial` for max_steps steps. Throws std::runtime_error
/// on write conflicts or instance overflow.
std::vector<Step> simulate(const maestro::Model& m, const std::vector<std::uint64_t>& initial);

bool admitted(const maestro::Model& m, const std::vector<std::uint64_t>& initial);

std::optional<std::uint64_t> violation(const maestro::Model& m, const maestro::Assertion& a,
                                       const std::vector<Step>& run);

/// Total state bits of the model (fields only).
unsigned state_bits(const maestro::Model& m);

/// Enumerates all 2^state_bits initial states, fields in declaration order,
/// each field most significant bit first.
Result enumerate(const maestro::Model& m);

}  // namespace oracle
