#pragma once

// Minimal YAML reader for Maestro model files.
//
// Supports block mappings and sequences, single-line flow mappings/sequences,
// quoted and plain scalars, comments and the `---` document marker. Flow
// scalars are lenient: `{entry: BV[5]}` reads `BV[5]` as one scalar even
// though strict YAML treats `[` as a flow indicator.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maestro::yaml {

struct Mark {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
public:
  Error(const std::string& what, Mark mark) : std::runtime_error(what), mark_(mark) {}
  [[nodiscard]] Mark mark() const noexcept { return mark_; }

private:
  Mark mark_;
};

struct Node {
  enum class Kind { Null, Scalar, Map, Seq };

  Kind kind = Kind::Null;
  Mark mark;
  std::string scalar;
  bool quoted = false;
  // Map entries, in document order.
  std::vector<std::string> keys;
  std::vector<Mark> key_marks;
  std::vector<Node> values;
  // Sequence items.
  std::vector<Node> items;

  [[nodiscard]] bool is_map() const noexcept { return kind == Kind::Map; }
  [[nodiscard]] bool is_seq() const noexcept { return kind == Kind::Seq; }
  [[nodiscard]] bool is_scalar() const noexcept { return kind == Kind::Scalar; }
  [[nodiscard]] bool is_null() const noexcept { return kind == Kind::Null; }
  [[nodiscard]] const Node* find(std::string_view key) const;
};

[[nodiscard]] Node parse(std::string_view text);

[[nodiscard]] const char* kind_name(Node::Kind k) noexcept;

}  // namespace maestro::yaml
