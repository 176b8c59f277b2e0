#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "json.hpp"
#include "maestro/cli.hpp"
#include "maestro/parser.hpp"
#include "support.hpp"

using namespace maestro;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string c(const std::string& f) { return test::corpus(f).string(); }

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check: counter holds, exit 0") {
  const Run r = run({"check", c("counter.yaml"), "--no-timing"});
  CHECK(r.code == kExitHolds);
  CHECK(r.out.find("HOLDS  alwaysOneClock") != std::string::npos);
  CHECK(r.out.find("all assertions hold") != std::string::npos);
  CHECK(r.out.find("wall time") == std::string::npos);
}

TEST_CASE("check: failing composition, exit 1, explanation and witness file") {
  const auto composed = tmp("maestro-cli-torc-dsrc.yaml");
  const Run w = run({"compose", c("baseline-load.yaml"), c("torc.integra"), c("dsrc.integra"), c("torc-ni.integra"), "-o",
                     composed.string()});
  REQUIRE(w.code == 0);
  const auto witness = tmp("maestro-cli-witness.json");
  const Run r = run({"check", composed.string(), "--trace-out", witness.string(), "--jobs", "3"});
  CHECK(r.code == kExitFails);
  CHECK(r.out.find("FAILS  NonInterference_core_done") != std::string::npos);
  CHECK(r.out.find("<== assertion violated") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(read_file(witness));
  CHECK(j.at("steps").size() == 16);
  const Run js = run({"check", composed.string(), "--json", "--no-timing"});
  CHECK(js.code == kExitFails);
  CHECK(nlohmann::json::parse(js.out).at("configs_admitted") == 4);
  std::filesystem::remove(composed);
  std::filesystem::remove(witness);
}

TEST_CASE("check: limit from flag and from the environment") {
  const auto composed = tmp("maestro-cli-dsrc-ni.yaml");
  REQUIRE(run({"compose", c("baseline-load.yaml"), c("dsrc.integra"), c("dsrc-ni.integra"), "-o", composed.string()}).code == 0);
  const Run small = run({"check", composed.string(), "--limit", "100"});
  CHECK(small.code == kExitError);
  CHECK(small.err.find("exceed the configuration limit of 100") != std::string::npos);
  ::setenv(kLimitEnv, "1000", 1);
  CHECK(run({"check", composed.string()}).code == kExitError);
  ::setenv(kLimitEnv, "bogus", 1);
  CHECK(run({"check", composed.string()}).code == kExitError);
  ::unsetenv(kLimitEnv);
  CHECK(run({"check", composed.string()}).code == kExitHolds);
  std::filesystem::remove(composed);
}

TEST_CASE("compose --matrix prints a verdict table") {
  const Run r = run({"compose", c("baseline-load.yaml"), c("torc.integra"), "--matrix",
                     c("torc-ni.integra"), "--matrix", c("dsrc.integra") + "," + c("torc-ni.integra"), "--jobs", "2"});
  CHECK(r.code == kExitFails);
  const std::string expected =
      "torc + torc-ni\n"
      "  HOLDS  LoadCompletes_m1\n"
      "  HOLDS  LoadCompletes_m2\n"
      "  HOLDS  NonInterference_core_done\n"
      "torc + dsrc + torc-ni\n"
      "  HOLDS  LoadCompletes_m1\n"
      "  HOLDS  LoadCompletes_m2\n"
      "  FAILS  NonInterference_core_done (step 6)\n";
  CHECK(r.out == expected);
}

TEST_CASE("compose: output reloads; errors exit 2") {
  const auto out = tmp("maestro-cli-torc.yaml");
  const Run r = run({"compose", c("baseline-load.yaml"), c("torc.integra"), "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(load_model(out).find_event("CacheHitEvent")->delay == 20);
  std::filesystem::remove(out);
  CHECK(run({"compose", c("baseline-load.yaml"), c("torc.integra")}).code == kExitError);
  const Run bad = run({"compose", c("baseline-load.yaml"), c("dsrc-slow.integra"), "-o", out.string()});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("ReturnToCoreEvent") != std::string::npos);
}

TEST_CASE("trace: golden text, --set, --json, --no-stutter") {
  const Run r = run({"trace", c("dirty-miss.yaml")});
  CHECK(r.code == 0);
  CHECK(r.out == read_file(test::corpus("golden/dirty-miss.trace.txt")));

  const Run bad = run({"trace", c("dirty-miss.yaml"), "--set", "line.dirty=0"});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("Dirty") != std::string::npos);

  CHECK(run({"trace", c("dirty-miss.yaml"), "--set", "line.nope=1"}).code == kExitError);
  CHECK(run({"trace", c("dirty-miss.yaml"), "--set", "line.dirty"}).code == kExitError);

  const Run j = run({"trace", c("two-event-delay.yaml"), "--json", "--no-stutter", "--steps", "20"});
  CHECK(j.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(j.out);
  CHECK(doc.at("terminated_early") == true);
  CHECK(doc.at("steps").size() == 4);
  CHECK(doc.at("steps").at(2).at("time") == 63);
}

TEST_CASE("emit-alloy and validate") {
  const Run r = run({"emit-alloy", c("counter.yaml")});
  CHECK(r.code == 0);
  CHECK(r.out == read_file(test::corpus("golden/counter.als")));

  const auto narrow = tmp("maestro-cli-narrow.yaml");
  {
    std::string text = read_file(test::corpus("counter.yaml"));
    text.replace(text.find("IntWidth: 7"), 11, "IntWidth: 4");
    std::ofstream(narrow) << text;
  }
  const Run w = run({"emit-alloy", narrow.string()});
  CHECK(w.code == 0);
  CHECK(w.err.find("warning") != std::string::npos);
  CHECK(w.out.find("4 Int") != std::string::npos);

  CHECK(run({"validate", c("baseline-load.yaml")}).code == 0);
  {
    std::ofstream(narrow) << "MachineState: 3\n";
  }
  const Run v = run({"validate", narrow.string()});
  CHECK(v.code == kExitError);
  CHECK(v.err.find(narrow.string() + ":1:") != std::string::npos);
  CHECK(run({"emit-alloy", narrow.string()}).code == kExitError);
  std::filesystem::remove(narrow);
}

TEST_CASE("usage errors exit 2; help exits 0") {
  CHECK(run({}).code == kExitError);
  CHECK(run({"frobnicate"}).code == kExitError);
  CHECK(run({"check"}).code == kExitError);
  CHECK(run({"check", "/nonexistent/model.yaml"}).code == kExitError);
  CHECK(run({"check", c("counter.yaml"), "--jobs", "0"}).code == kExitError);
  const Run h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("emit-alloy") != std::string::npos);
}

}
