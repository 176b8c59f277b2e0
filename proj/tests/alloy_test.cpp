#include <regex>
#include <sstream>

#include "doctest.h"

#include "maestro/alloy.hpp"
#include "maestro/parser.hpp"
#include "support.hpp"

using namespace maestro;

namespace {

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::size_t occurrences(const std::string& text, const std::regex& re) {
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST_SUITE("alloy") {

TEST_CASE("golden files for every corpus model") {
  for (const char* f : {"counter-minimal", "counter", "dirty-miss", "two-event-delay", "baseline-load"}) {
    CAPTURE(f);
    const AlloyOutput out = emit_alloy(test::corpus_model(std::string(f) + ".yaml"));
    const std::string golden = read_file(test::corpus("golden/" + std::string(f) + ".als"));
    CHECK(squash(out.text) == squash(golden));
  }
}

TEST_CASE("counter: signature, step/time fact and commands") {
  const std::string t = squash(emit_alloy(test::corpus_model("counter.yaml")).text);
  CHECK(t.find("open bitvector as bv") == 0);
  CHECK(t.find(squash("sig ClockEdgeEvent {\nvar status: Int, var appearance_time: Int, var delay: Int, var event_id: "
                      "Int, var reason: Int, var parent_id: Int }")) != std::string::npos);
  CHECK(t.find(squash("one sig TimingRecord{var time: Int}\none sig StepRecord{var step: Int}")) != std::string::npos);
  CHECK(t.find(squash("fact{always{\n StepRecord.step < 32 => {\n   StepRecord.step' = add[StepRecord.step,1]\n"
                      "   TimingRecord.time' > TimingRecord.time }}}")) != std::string::npos);
  CHECK(t.find(squash("run {} for 33 steps, 7 Int\ncheck alwaysOneClock for 33 steps, 7 Int\n"
                      "check alwaysIncrementCounter for 33 steps, 7 Int\ncheck alwaysIncrementTime for 33 steps, 7 Int")) !=
        std::string::npos);
  CHECK(t.find("always {StepRecord.step < 32 => addBitsToVec5[One, Zero, Zero, Zero, Zero, ctr1_entry.val]}") !=
        std::string::npos);
}

TEST_CASE("structural completeness: one sig per event, one assert and one check per assertion") {
  const Model m = test::composed("baseline-load.yaml", {"torc.integra", "dsrc.integra", "torc-ni.integra"});
  const std::string t = emit_alloy(m).text;
  for (const EventSpec& e : m.events) {
    CAPTURE(e.name);
    CHECK(occurrences(t, std::regex("\\bsig " + e.name + " \\{")) == 1);
  }
  for (const Assertion& a : m.assertions) {
    CAPTURE(a.name);
    CHECK(occurrences(t, std::regex("\\bassert " + a.name + " \\{")) == 1);
    CHECK(occurrences(t, std::regex("\\bcheck " + a.name + " for")) == 1);
  }
}

TEST_CASE("FINALLY assertions are evaluated at the last step") {
  const std::string t = emit_alloy(test::corpus_model("two-event-delay.yaml")).text;
  CHECK(t.find("StepRecord.step = 5") != std::string::npos);
}

TEST_CASE("integer width warning still emits") {
  Model m = test::corpus_model("counter.yaml");
  m.int_width = 4;
  const AlloyOutput out = emit_alloy(m);
  REQUIRE(out.diagnostics.size() == 1);
  CHECK(out.diagnostics[0].severity == Severity::Warning);
  CHECK(out.text.find("run {} for 33 steps, 4 Int") != std::string::npos);
  CHECK(emit_alloy(test::corpus_model("counter.yaml")).diagnostics.empty());
  CHECK(alloy_time_bound(test::corpus_model("two-event-delay.yaml")) == 6 * 63);
}

TEST_CASE("bit-vector library option") {
  AlloyOptions o;
  o.bitvector_lib = "util/bv";
  CHECK(emit_alloy(test::corpus_model("counter.yaml"), o).text.rfind("open util/bv as bv", 0) == 0);
}

}
