#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maestro/ast.hpp"

namespace maestro {

/// Syntax error with the location of the offending token.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, SourceSpan span)
      : std::runtime_error(span.str() + ": " + message), message_(message), span_(std::move(span)) {}

  [[nodiscard]] const std::string& message() const noexcept { return message_; }
  [[nodiscard]] const SourceSpan& span() const noexcept { return span_; }

private:
  std::string message_;
  SourceSpan span_;
};

/// A syntactically valid model that fails validation.
class ModelError : public std::runtime_error {
public:
  explicit ModelError(std::vector<Diagnostic> diagnostics);
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses a model document and validates it. Throws ParseError or ModelError.
[[nodiscard]] Model parse_model(std::string_view text, const std::string& file = {});

/// Parses without running validate(); used by tools that report diagnostics themselves.
[[nodiscard]] Model parse_model_unchecked(std::string_view text, const std::string& file = {});

[[nodiscard]] Model load_model(const std::filesystem::path& path);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

// Embedded mini-grammars. `origin` is the location of the first character of
// `text` inside its file; error spans are offset from it.

[[nodiscard]] std::vector<TriggerClause> parse_trigger_string(std::string_view text,
                                                              const SourceSpan& origin = {});
[[nodiscard]] std::vector<StateChangeClause> parse_statechange_string(std::string_view text,
                                                                      const SourceSpan& origin = {});
[[nodiscard]] Assertion parse_assertion_string(std::string_view text, const std::string& name = {},
                                               const SourceSpan& origin = {});
/// `allow_primed` is true only for ALWAYS bodies.
[[nodiscard]] BoolPtr parse_bool_expr(std::string_view text, const SourceSpan& origin = {},
                                      bool allow_primed = false);
[[nodiscard]] ExprPtr parse_expr(std::string_view text, const SourceSpan& origin = {});
/// `None` or `name: BV[w], ...`.
[[nodiscard]] std::vector<DataField> parse_carried_data(std::string_view text,
                                                        const SourceSpan& origin = {});
/// `instance.field`
[[nodiscard]] StateKey parse_state_key(std::string_view text, const SourceSpan& origin = {});

}  // namespace maestro
