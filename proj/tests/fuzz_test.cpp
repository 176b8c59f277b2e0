#include "doctest.h"

#include "fuzz.hpp"
#include "support.hpp"

TEST_SUITE("fuzz") {

TEST_CASE("parse is total and every rejection is located") {
  std::vector<std::string> models;
  for (const char* f : {"counter-minimal.yaml", "counter.yaml", "dirty-miss.yaml", "baseline-load.yaml"}) {
    models.push_back(maestro::read_file(test::corpus(f)));
  }
  std::vector<std::string> programs;
  for (const char* f : {"dsrc.integra", "dsrm.integra", "torc-ni.integra"}) {
    programs.push_back(maestro::read_file(test::corpus(f)));
  }
  const test::FuzzStats st = test::fuzz_parsers(20000, 7, models, programs);
  CAPTURE(st.first_bad);
  CAPTURE(st.first_bad_error);
  CHECK(st.inputs == 20000);
  CHECK(st.rejected > 0);
  CHECK(st.accepted > 0);
  CHECK(st.unlocated == 0);
  CHECK(st.foreign == 0);
}

}
