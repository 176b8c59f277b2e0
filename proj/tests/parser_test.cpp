#include "doctest.h"

#include "maestro/parser.hpp"
#include "maestro/printer.hpp"
#include "maestro/validate.hpp"
#include "support.hpp"

using namespace maestro;

namespace {

SourceSpan parse_error_span(const std::string& text) {
  try {
    (void)parse_model(text, "t.yaml");
  } catch (const ParseError& e) {
    return e.span();
  } catch (const ModelError& e) {
    REQUIRE(!e.diagnostics().empty());
    return e.diagnostics().front().span;
  }
  FAIL("expected a parse error");
  return {};
}

std::string error_message(const std::string& text) {
  try {
    (void)parse_model(text, "t.yaml");
  } catch (const ParseError& e) {
    return e.message();
  } catch (const ModelError& e) {
    return e.diagnostics().front().message;
  }
  return "";
}

const std::string kFlag = "     - Flag: {set: BV[1]}\n";
const std::string kFlagInst = "     - flag: Flag\n";

}  // namespace

TEST_SUITE("parser") {

TEST_CASE("the minimal counter parses as written") {
  const Model m = test::corpus_model("counter-minimal.yaml");
  REQUIRE(m.events.size() == 1);
  const EventSpec& clk = m.events[0];
  CHECK(clk.name == "ClockEdgeEvent");
  CHECK(clk.present_at_start);
  REQUIRE(clk.triggers.size() == 1);
  CHECK(clk.triggers[0].target == "ClockEdgeEvent");
  REQUIRE(clk.state_changes.size() == 1);
  CHECK(clk.state_changes[0].target == StateKey{"ctr1", "entry"});
  CHECK(to_string(clk.state_changes[0]) == "SC ctr1.entry <- ctr1.entry + 1");
  REQUIRE(m.fields().size() == 1);
  CHECK(m.fields()[0].width == 5);
  CHECK(m.max_steps == 33);
  CHECK(m.int_width == 7);
  REQUIRE(m.assertions.size() == 1);
  CHECK(m.assertions[0].mode == AssertionMode::Always);
  CHECK(has_primed(m.assertions[0].body));
  CHECK(validate(m).empty());
}

TEST_CASE("every corpus model validates cleanly") {
  for (const char* f : {"counter-minimal.yaml", "counter.yaml", "dirty-miss.yaml", "two-event-delay.yaml",
                        "baseline-load.yaml"}) {
    CAPTURE(f);
    CHECK(validate(test::corpus_model(f)).empty());
  }
}

TEST_CASE("assertion strings") {
  const Assertion a = parse_assertion_string("ALWAYS ctr1.entry'=ctr1.entry+1", "inc");
  CHECK(a.mode == AssertionMode::Always);
  CHECK(has_primed(a.body));
  CHECK(to_string(a.body) == "ctr1.entry' = ctr1.entry + 1");

  const Assertion f = parse_assertion_string("FINALLY done.bit = 1");
  CHECK(f.mode == AssertionMode::Finally);
  CHECK_FALSE(has_primed(f.body));

  try {
    (void)parse_assertion_string("FINALLY x.y' = 1", "bad", SourceSpan{"m.yaml", 7, 12, 12});
    FAIL("primed FINALLY accepted");
  } catch (const ParseError& e) {
    CHECK(e.message() == "primed reference illegal in FINALLY");
    CHECK(e.span().line == 7);
    CHECK(e.span().column_begin >= 12);
  }
  CHECK_THROWS_AS((void)parse_assertion_string("SOMETIMES x.y = 1"), ParseError);
}

TEST_CASE("operator precedence: not > comparison > and > or; + and - left associative") {
  CHECK(to_string(parse_bool_expr("a.x = 1 or a.y = 1 and a.z = 0")) == "a.x = 1 or a.y = 1 and a.z = 0");
  CHECK(to_string(parse_bool_expr("(a.x = 1 or a.y = 1) and a.z = 0")) == "(a.x = 1 or a.y = 1) and a.z = 0");
  CHECK(to_string(parse_expr("a.x - (a.y - 1)")) == "a.x - (a.y - 1)");
  CHECK(to_string(parse_expr("(a.x - a.y) - 1")) == "a.x - a.y - 1");
  CHECK(to_string(parse_bool_expr("(a.x + 1) = 2")) == "a.x + 1 = 2");
  CHECK(to_string(parse_bool_expr("not (a.x = 1)")) == "not a.x = 1");
}

TEST_CASE("trigger and state-change strings") {
  const auto ts = parse_trigger_string("IF c.v = 1 : Trigger A{NONE}; Trigger B{x=c.v + 1, y=2}");
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].target == "A");
  CHECK(to_string(ts[0].condition) == "c.v = 1");
  CHECK(ts[1].assignments.size() == 2);
  CHECK(is_true_const(ts[1].condition));
  CHECK(parse_trigger_string("None").empty());
  CHECK(parse_trigger_string("NONE").empty());

  const auto scs = parse_statechange_string("SC c.v <- 1; IF self.k = 0 : SC c.w <- c.v");
  REQUIRE(scs.size() == 2);
  CHECK(scs[1].target == StateKey{"c", "w"});
  CHECK_THROWS_AS((void)parse_statechange_string("SC c.v' <- 1"), ParseError);
  CHECK_THROWS_AS((void)parse_statechange_string("SC c.v = 1"), ParseError);
}

TEST_CASE("carried data and counts") {
  const auto d = parse_carried_data("addr: BV[2], way: BV[1]");
  REQUIRE(d.size() == 2);
  CHECK(d[0] == DataField{"addr", 2});
  CHECK(parse_carried_data("None").empty());
  CHECK(to_string(parse_bool_expr("#ClockEdgeEvent = 1")) == "#ClockEdgeEvent = 1");
  CHECK(to_string(parse_bool_expr("time' = time + 1", {}, true)) == "time' = time + 1");
}

TEST_CASE("integer literals out of range are rejected with a location") {
  try {
    (void)parse_expr("a.x + 99999999999999999999999");
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(e.message() == "integer literal out of range");
  }
}

TEST_CASE("nesting depth is bounded, not a stack overflow") {
  const std::string deep = std::string(5000, '(') + "a.x = 1" + std::string(5000, ')');
  CHECK_THROWS_AS((void)parse_bool_expr(deep), ParseError);
  const std::string ok = std::string(50, '(') + "a.x = 1" + std::string(50, ')');
  CHECK_NOTHROW((void)parse_bool_expr(ok));
}

TEST_CASE("model errors carry file, line and column") {
  const std::string events = test::event_text("E", "Trigger Missing{NONE}", "None", 0, true);
  const std::string text = test::model_text(kFlag, kFlagInst, events);
  // Unresolved trigger target is a validation diagnostic.
  CHECK(error_message(text).find("unresolved event 'Missing'") != std::string::npos);
  const SourceSpan s = parse_error_span(text);
  CHECK(s.file == "t.yaml");
  CHECK(s.line >= 1);

  const std::string bad_width = test::model_text("     - Flag: {set: BV[65]}\n", kFlagInst,
                                                 test::event_text("E", "None", "None", 0, true));
  CHECK(error_message(bad_width).find("width") != std::string::npos);
  CHECK(parse_error_span(bad_width).line == 3);

  const std::string unknown = "Bogus: 1\n" + test::model_text(kFlag, kFlagInst, test::event_text("E", "None", "None"));
  CHECK(error_message(unknown) == "unknown section 'Bogus'");
  CHECK(parse_error_span(unknown).line == 1);

  const std::string bad_flag = test::model_text(kFlag, kFlagInst, test::event_text("E", "None", "None"));
  std::string b = bad_flag;
  b.replace(b.find("\"No\""), 4, "\"Maybe\"");
  CHECK(error_message(b).find("PresentAtStart") != std::string::npos);

  const std::string syntax = test::model_text(kFlag, kFlagInst, test::event_text("E", "Trigger {NONE}", "None"));
  const SourceSpan ss = parse_error_span(syntax);
  CHECK(ss.line == 9);
  CHECK(ss.column_begin > 1);

  CHECK(error_message("MachineState:\n  - TypeSpec:\n" + kFlag + "  - InstanceSpec:\n" + kFlagInst + "Events: []\n")
            .find("at least one event") != std::string::npos);
}

TEST_CASE("validation examples") {
  const std::string delayed_start = test::model_text(kFlag, kFlagInst, test::event_text("E", "None", "None", 3, true));
  const Model m = parse_model_unchecked(delayed_start, "t.yaml");
  const auto diags = validate(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == Severity::Warning);
  CHECK(diags[0].message.find("delay 3 forced to 0") != std::string::npos);
  CHECK_NOTHROW((void)parse_model(delayed_start));
  CHECK(m.events[0].effective_delay() == 0);

  const std::string dup = test::model_text(kFlag, kFlagInst,
                                           test::event_text("E", "None", "None", 0, true) +
                                               test::event_text("E", "None", "None"));
  CHECK(error_message(dup) == "duplicate event 'E'");

  const std::string bad_ref = test::model_text(kFlag, kFlagInst, test::event_text("E", "None", "SC flag.nope <- 1", 0, true));
  CHECK(error_message(bad_ref).find("flag.nope") != std::string::npos);
}

}
