#pragma once

#include <string>
#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

struct AlloyOptions {
  /// Module opened on the first line of the output.
  std::string bitvector_lib = "bitvector";
};

struct AlloyOutput {
  std::string text;
  /// Width warnings; emission still completes.
  std::vector<Diagnostic> diagnostics;
};

/// Emits an Alloy 6 model of `model`. The bit-vector module is expected to
/// provide `BitVecN` signatures, `bitVecFromBitsN[b0, ..., v]` (v holds the
/// constant, least significant bit first), `addBitsToVecN[b0, ..., v]`
/// (v' = v + constant) and `valN[v]: Int`.
[[nodiscard]] AlloyOutput emit_alloy(const Model& model, const AlloyOptions& options = {});

/// Largest time value a bounded run can reach, estimated as
/// max_steps * (1 + largest event delay).
[[nodiscard]] std::uint64_t alloy_time_bound(const Model& model);

}  // namespace maestro
