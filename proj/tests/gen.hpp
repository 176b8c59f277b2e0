#pragma once

// Random generators shared by the property tests and the acceptance fuzzer.

#include <random>
#include <string>

#include "maestro/ast.hpp"

namespace test {

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }
  bool coin() { return below(2) == 0; }
  std::mt19937_64& rng() { return rng_; }

  maestro::ExprPtr expr(int depth, bool primed_ok) {
    using namespace maestro;
    const std::uint64_t pick = depth <= 0 ? below(4) : below(6);
    switch (pick) {
      case 0: return make_literal(below(coin() ? 4 : 300));
      case 1: return make_state({inst(), field()}, primed_ok && coin());
      case 2: return coin() ? make_time(primed_ok && coin()) : make_count(event(), primed_ok && coin());
      case 3: return make_data(field());
      default:
        return make_binary(coin() ? ArithOp::Add : ArithOp::Sub, expr(depth - 1, primed_ok), expr(depth - 1, primed_ok));
    }
  }

  maestro::BoolPtr boolean(int depth, bool primed_ok) {
    using namespace maestro;
    const std::uint64_t pick = depth <= 0 ? 0 : below(5);
    switch (pick) {
      case 0: return make_compare(static_cast<CmpOp>(below(6)), expr(2, primed_ok), expr(2, primed_ok));
      case 1: return make_not(boolean(depth - 1, primed_ok));
      case 2: return make_join(Junction::And, boolean(depth - 1, primed_ok), boolean(depth - 1, primed_ok));
      case 3: return make_join(Junction::Or, boolean(depth - 1, primed_ok), boolean(depth - 1, primed_ok));
      default: return make_compare(CmpOp::Eq, expr(1, primed_ok), expr(1, primed_ok));
    }
  }

  /// Printable noise mixed with grammar tokens.
  std::string noise(std::size_t max_len) {
    static const char* const kTokens[] = {"IF", "Trigger", "SC", "<-", "{", "}", "NONE", "None", ";", ":", "=", "!=",
                                          "<=", ">=", "<", ">", "(", ")", "and", "or", "not", "+", "-", "'", "self.",
                                          "a.b", "x", "0", "17", "#E", "time", ",", " ", "ALWAYS", "FINALLY", "BV[3]"};
    std::string s;
    const std::size_t len = below(max_len + 1);
    while (s.size() < len) {
      if (coin()) {
        s += kTokens[below(std::size(kTokens))];
      } else {
        s += static_cast<char>(below(256));
      }
    }
    return s;
  }

private:
  std::string inst() { return below(2) == 0 ? "a" : "core"; }
  std::string field() { return below(2) == 0 ? "x" : "done"; }
  std::string event() { return below(2) == 0 ? "E" : "CacheHitEvent"; }
  std::mt19937_64 rng_;
};

}  // namespace test
