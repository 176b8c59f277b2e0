#include <algorithm>

#include "doctest.h"

#include "maestro/integra.hpp"
#include "maestro/printer.hpp"
#include "maestro/validate.hpp"
#include "support.hpp"

using namespace maestro;

namespace {

const std::vector<std::string> kPrograms = {"torc.integra",    "dsrc.integra",      "dsrm.integra",   "ssmesi.integra",
                                            "dsrc-slow.integra", "torc-ni.integra", "dsrc-ni.integra"};

IntegraError::Kind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const IntegraError& e) {
    return e.kind();
  }
  FAIL("no IntegraError");
  return IntegraError::Kind::Syntax;
}

bool has_directive(const TransformProgram& p, TransformKind k) {
  return std::any_of(p.transforms.begin(), p.transforms.end(), [&](const Transform& t) { return t.kind == k; });
}

bool is_subsequence(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  std::size_t j = 0;
  for (const std::string& s : big) {
    if (j < small.size() && small[j] == s) ++j;
  }
  return j == small.size();
}

std::vector<std::string> trigger_targets(const EventSpec& e, const std::string& suffix = "") {
  std::vector<std::string> out;
  for (const TriggerClause& t : e.triggers) out.push_back(t.target + suffix);
  return out;
}

std::vector<std::string> change_targets(const EventSpec& e, const std::string& suffix = "") {
  std::vector<std::string> out;
  for (const StateChangeClause& sc : e.state_changes) out.push_back(sc.target.instance + suffix + "." + sc.target.field);
  return out;
}

}  // namespace

TEST_SUITE("integra") {

TEST_CASE("corpus programs parse and round-trip through the writer") {
  for (const std::string& f : kPrograms) {
    CAPTURE(f);
    const TransformProgram p = test::corpus_program(f);
    CHECK(p.loc() > 0);
    const TransformProgram back = parse_integra(write_integra(p));
    CHECK(back == p);
    const TransformProgram c = compose({p});
    CHECK(parse_integra(write_integra(c)) == c);
  }
}

TEST_CASE("comments: line start and whitespace-hash-space; counts survive") {
  const TransformProgram p = parse_integra(
      "# header\n"
      "ADD_ASSERTION One, ALWAYS #ClockEdgeEvent = 1 # trailing comment\n"
      "   # indented comment\n"
      "ADD_DELAY ClockEdgeEvent, 3\n");
  REQUIRE(p.loc() == 2);
  CHECK(p.transforms[0].directive() == "ADD_ASSERTION One, ALWAYS #ClockEdgeEvent = 1");
}

TEST_CASE("delays add up per event") {
  const TransformProgram a = parse_integra("ADD_DELAY E, 5\n");
  const TransformProgram b = parse_integra("ADD_DELAY E, 7\n");
  const TransformProgram c = compose({a, b});
  REQUIRE(c.loc() == 1);
  CHECK(c.transforms[0].directive() == "ADD_DELAY E, 12");
  CHECK(compose({b, a}) == c);
}

TEST_CASE("guards on one event fold into one; AND with OR is a conflict") {
  const TransformProgram a = parse_integra("GUARD_AND E, x.a = 1\nGUARD_AND E, x.b = 0\n");
  const TransformProgram b = parse_integra("GUARD_AND E, x.a = 1\n");
  const TransformProgram c = compose({a, b});
  REQUIRE(c.loc() == 1);
  CHECK(c.transforms[0].directive() == "GUARD_AND E, x.a = 1 and x.b = 0");
  const TransformProgram o = parse_integra("GUARD_OR E, x.c = 1\n");
  CHECK(error_kind([&] { (void)compose({a, o}); }) == IntegraError::Kind::ANDORConflict);
  CHECK_NOTHROW((void)compose({a, parse_integra("GUARD_OR F, x.c = 1\n")}));
}

TEST_CASE("same name, different body is a conflict; identical bodies merge") {
  const TransformProgram a = parse_integra("ADD_EVENT X, \"None\", \"None\", \"None\", 0, No\n");
  const TransformProgram b = parse_integra("ADD_EVENT X, \"None\", \"None\", \"None\", 4, No\n");
  CHECK(compose({a, a}).loc() == 1);
  CHECK(error_kind([&] { (void)compose({a, b}); }) == IntegraError::Kind::Conflict);
  const TransformProgram s1 = parse_integra("DUPLICATE_STATE_NI m1, m2\n");
  const TransformProgram s2 = parse_integra("DUPLICATE_STATE_NI a, b\n");
  CHECK(error_kind([&] { (void)compose({s1, s2}); }) == IntegraError::Kind::Conflict);
}

TEST_CASE("syntax errors carry a location") {
  try {
    (void)parse_integra("ADD_DELAY E, 3\nADD_NONSENSE E\n", "bad.integra");
    FAIL("accepted");
  } catch (const IntegraError& e) {
    CHECK(e.kind() == IntegraError::Kind::Syntax);
    CHECK(e.span().file == "bad.integra");
    CHECK(e.span().line == 2);
  }
  try {
    (void)parse_integra("ADD_TRIGGER E, IF x.a = : Trigger F{NONE}\n", "bad.integra");
    FAIL("accepted");
  } catch (const IntegraError& e) {
    CHECK(e.kind() == IntegraError::Kind::Syntax);
    CHECK(e.span().line == 1);
    CHECK(e.span().column_begin > 15);
  }
  CHECK(error_kind([] { (void)parse_integra("ADD_DELAY E\n"); }) == IntegraError::Kind::Syntax);
  CHECK(error_kind([] { (void)parse_integra("ADD_DELAY E, -3\n"); }) == IntegraError::Kind::Syntax);
  CHECK(error_kind([] { (void)parse_integra("ADD_EVENT X, \"None, \"None\", \"None\", 0, No\n"); }) ==
        IntegraError::Kind::Syntax);
}

TEST_CASE("apply: unresolved references and invalid results") {
  const Model base = test::corpus_model("baseline-load.yaml");
  CHECK(error_kind([&] { (void)apply(base, parse_integra("ADD_DELAY NoSuchEvent, 3\n")); }) ==
        IntegraError::Kind::UnresolvedReference);
  // A trigger aimed at an event no program adds fails validation of the result.
  try {
    (void)apply(base, test::corpus_program("dsrc-slow.integra"));
    FAIL("accepted");
  } catch (const IntegraError& e) {
    CHECK(e.kind() == IntegraError::Kind::InvalidResult);
    REQUIRE_FALSE(e.diagnostics().empty());
    CHECK(e.diagnostics()[0].message.find("ReturnToCoreEvent") != std::string::npos);
  }
  CHECK(error_kind([&] { (void)apply(base, parse_integra("SECRET_FREE line.present\n")); }) ==
        IntegraError::Kind::UnresolvedReference);
  try {
    (void)apply(base, parse_integra("ADD_STATE_CHANGE IssueEvent, SC line.nope <- 1\n"));
    FAIL("accepted");
  } catch (const IntegraError& e) {
    CHECK((e.kind() == IntegraError::Kind::InvalidResult || e.kind() == IntegraError::Kind::UnresolvedReference));
  }
}

TEST_CASE("apply: TORC adds its delay") {
  const Model m = test::composed("baseline-load.yaml", {"torc.integra"});
  CHECK(m.find_event("CacheHitEvent")->delay == 20);
  CHECK(m.find_event("MemoryAccessEvent")->delay == 18);
}

TEST_CASE("apply: guards only touch original clauses") {
  const Model m = test::composed("baseline-load.yaml", {"dsrc.integra"});
  const EventSpec* hit = m.find_event("CacheHitEvent");
  REQUIRE(hit != nullptr);
  REQUIRE(hit->triggers.size() == 2);
  CHECK(hit->triggers[0].target == "CompletionEvent");
  CHECK(to_string(hit->triggers[0].condition).find("not") == 0);
  CHECK(hit->triggers[1].target == "ReturnToCoreEvent");
  CHECK(to_string(hit->triggers[1].condition).find("not") == std::string::npos);
  // State changes of the hit are guarded as well.
  for (const StateChangeClause& sc : hit->state_changes) {
    CHECK(to_string(sc.condition).find("not (core.spec = 1") != std::string::npos);
  }
  CHECK(validate(m).empty());
}

TEST_CASE("apply: NI duplication names and equalities") {
  const Model m = test::composed("baseline-load.yaml", {"torc.integra", "torc-ni.integra"});
  CHECK(m.events.size() == 12);
  CHECK(m.find_event("IssueEvent_m1") != nullptr);
  CHECK(m.find_event("CompletionEvent_m2") != nullptr);
  CHECK(m.find_event("IssueEvent") == nullptr);
  CHECK(m.state.find_instance("line_m2") != nullptr);
  REQUIRE(m.assertions.size() == 3);
  CHECK(m.assertions[0].name == "LoadCompletes_m1");
  CHECK(m.assertions[1].name == "LoadCompletes_m2");
  CHECK(m.assertions[2].name == "NonInterference_core_done");
  CHECK(format_assertion(m.assertions[2]) == "ALWAYS core_m1.done = core_m2.done");
  // Every non-secret field is tied across machines; the secret one is not.
  bool presence_tied = false;
  int equalities = 0;
  for (const InitialConstraint& c : m.initial_constraints) {
    if (c.name.rfind("Equal_", 0) == 0) ++equalities;
    presence_tied |= c.name == "Equal_line_present";
  }
  CHECK(equalities == 5);
  CHECK_FALSE(presence_tied);
  CHECK(validate(m).empty());
}

TEST_CASE("property: composition commutes for every pair of corpus programs") {
  const Model base = test::corpus_model("baseline-load.yaml");
  for (std::size_t i = 0; i < kPrograms.size(); ++i) {
    for (std::size_t j = 0; j < kPrograms.size(); ++j) {
      if (i == j) continue;
      CAPTURE(kPrograms[i]);
      CAPTURE(kPrograms[j]);
      const TransformProgram a = test::corpus_program(kPrograms[i]);
      const TransformProgram b = test::corpus_program(kPrograms[j]);
      CHECK(compose({a, b}) == compose({b, a}));
      std::string ab_err;
      std::string ba_err;
      std::optional<Model> ab;
      std::optional<Model> ba;
      try { ab = apply(base, compose({a, b})); } catch (const IntegraError& e) { ab_err = e.what(); }
      try { ba = apply(base, compose({b, a})); } catch (const IntegraError& e) { ba_err = e.what(); }
      CHECK(ab_err == ba_err);
      CHECK(ab.has_value() == ba.has_value());
      if (ab && ba) {
        CHECK(*ab == *ba);
        CHECK(write_model(*ab) == write_model(*ba));
      }
    }
  }
}

TEST_CASE("property: composing three programs is order independent") {
  const std::vector<std::string> trio = {"torc.integra", "dsrc.integra", "torc-ni.integra"};
  std::vector<std::size_t> order = {0, 1, 2};
  std::optional<std::string> first;
  do {
    std::vector<TransformProgram> ps;
    for (std::size_t k : order) ps.push_back(test::corpus_program(trio[k]));
    const std::string text = write_model(apply(test::corpus_model("baseline-load.yaml"), compose(ps)));
    if (!first) first = text;
    CHECK(text == *first);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("property: transforms never delete (monotonicity)") {
  const Model base = test::corpus_model("baseline-load.yaml");
  for (const std::string& f : kPrograms) {
    if (f == "dsrc-slow.integra") continue;  // needs dsrc
    CAPTURE(f);
    const TransformProgram p = test::corpus_program(f);
    const Model m = apply(base, compose({p}));
    const bool ni = has_directive(p, TransformKind::DuplicateStateForNI);
    const std::vector<std::string> suffixes = ni ? std::vector<std::string>{"_m1", "_m2"} : std::vector<std::string>{""};
    for (const std::string& sfx : suffixes) {
      for (const EventSpec& e : base.events) {
        const EventSpec* t = m.find_event(e.name + sfx);
        REQUIRE(t != nullptr);
        const std::string ev_sfx = sfx;
        std::vector<std::string> base_targets;
        for (const TriggerClause& c : e.triggers) base_targets.push_back(c.target + ev_sfx);
        CHECK(is_subsequence(base_targets, trigger_targets(*t)));
        CHECK(is_subsequence(change_targets(e, sfx), change_targets(*t)));
        CHECK(t->delay >= e.delay);
        CHECK(t->carried_data.size() >= e.carried_data.size());
      }
      for (const FieldInfo& fi : base.fields()) {
        const auto fields = m.fields();
        const StateKey k{fi.key.instance + sfx, fi.key.field};
        CHECK(std::any_of(fields.begin(), fields.end(), [&](const FieldInfo& x) { return x.key == k && x.width == fi.width; }));
      }
      for (const Assertion& a : base.assertions) {
        CHECK(std::any_of(m.assertions.begin(), m.assertions.end(),
                          [&](const Assertion& x) { return x.name == a.name + sfx; }));
      }
    }
    CHECK(m.initial_constraints.size() >= base.initial_constraints.size() * suffixes.size());
  }
}

TEST_CASE("property: composing an additive program with itself changes nothing") {
  for (const std::string& f : kPrograms) {
    const TransformProgram p = test::corpus_program(f);
    if (has_directive(p, TransformKind::AddDelay)) continue;  // delays are additive by design
    CAPTURE(f);
    CHECK(compose({p, p}) == compose({p}));
    CHECK(compose({compose({p}), p}) == compose({p}));
  }
  // With ADD_DELAY the self-composition doubles the delay.
  const TransformProgram torc = test::corpus_program("torc.integra");
  CHECK(compose({torc, torc}).transforms.at(0).directive() == "ADD_DELAY CacheHitEvent, 36");
}

}
