#include <fstream>

#include "doctest.h"

#include "maestro/checker.hpp"
#include "maestro/corpus.hpp"
#include "maestro/engine.hpp"
#include "maestro/parser.hpp"
#include "maestro/trace_io.hpp"
#include "maestro/validate.hpp"
#include "support.hpp"

using namespace maestro;

TEST_SUITE("corpus") {

TEST_CASE("manifest lists at least ten entries and resolves") {
  const auto entries = corpus_manifest();
  CHECK(entries.size() >= 10);
  for (const CorpusEntry& e : entries) {
    CAPTURE(e.id);
    if (e.kind == CorpusEntry::Kind::Model) CHECK(validate(load_model(default_corpus_dir() / e.path)).empty());
    if (e.kind == CorpusEntry::Kind::Transform) CHECK_NOTHROW((void)load_integra((default_corpus_dir() / e.path).string()));
  }
  REQUIRE(find_entry(entries, "counter-holds") != nullptr);
  REQUIRE(find_entry(entries, "torc-dsrc-torc-ni") != nullptr);
  CHECK(find_entry(entries, "torc-dsrc-torc-ni")->verdicts.at("NonInterference_core_done") == "Fails");
}

TEST_CASE("every expected verdict matches check") {
  const auto entries = corpus_manifest();
  for (const CorpusEntry& e : entries) {
    if (e.kind != CorpusEntry::Kind::ExpectedVerdict) continue;
    CAPTURE(e.id);
    const CheckReport r = check(build_composition(entries, e));
    CHECK(r.results.size() == e.verdicts.size());
    for (const auto& [name, verdict] : e.verdicts) {
      CAPTURE(name);
      const AssertionResult* res = r.find(name);
      REQUIRE(res != nullptr);
      CHECK(verdict == (res->verdict == Verdict::Holds ? "Holds" : "Fails"));
    }
  }
}

TEST_CASE("manifest errors name the broken reference") {
  const auto dir = std::filesystem::temp_directory_path() / "maestro-bad-manifest";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "manifest.json")
        << R"({"entries":[{"id":"v","kind":"expected-verdict","model":"ghost","transforms":[],"verdicts":{}}]})";
  }
  try {
    (void)corpus_manifest(dir);
    FAIL("accepted");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache-miss trace matches its golden text") {
  const Model m = test::corpus_model("dirty-miss.yaml");
  const Trace t = run_trace(m, assignment_for(m, free_bits(m), 0));
  const std::string golden = read_file(test::corpus("golden/dirty-miss.trace.txt"));
  CHECK(trace_to_text(t) + "\nevent tree:\n" + render_event_tree(t) == golden);
}

TEST_CASE("completion times of the NI compositions") {
  // (programs, done time on m1, done time on m2); m1 is the machine with the line present.
  struct Row {
    std::vector<std::string> programs;
    std::uint64_t m1;
    std::uint64_t m2;
  };
  const std::vector<Row> rows = {
      {{"torc-ni.integra"}, 5, 23},
      {{"torc.integra", "torc-ni.integra"}, 23, 23},
      {{"torc.integra", "dsrc.integra", "torc-ni.integra"}, 46, 23},
      {{"torc.integra", "dsrm.integra", "torc-ni.integra"}, 26, 26},
      {{"torc.integra", "dsrc.integra", "dsrc-slow.integra", "torc-ni.integra"}, 46, 46},
  };
  for (const Row& row : rows) {
    CAPTURE(row.programs.back());
    CAPTURE(row.programs.size());
    const Model m = test::composed("baseline-load.yaml", row.programs);
    const auto fb = free_bits(m);
    REQUIRE(fb.size() == 2);
    // Index 2 = binary 10: present on m1, absent on m2.
    const Trace t = run_trace(m, assignment_for(m, fb, 2));
    const auto d1 = t.field_index({"core_m1", "done"});
    const auto d2 = t.field_index({"core_m2", "done"});
    REQUIRE(d1);
    REQUIRE(d2);
    auto done_at = [&](std::size_t f) -> std::optional<std::uint64_t> {
      for (const StepRecord& s : t.steps) {
        if (s.state[f].bits() == 1) return s.time;
      }
      return std::nullopt;
    };
    CHECK(done_at(*d1) == row.m1);
    CHECK(done_at(*d2) == row.m2);
  }
}

}
