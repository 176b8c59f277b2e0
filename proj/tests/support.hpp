#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "maestro/ast.hpp"
#include "maestro/corpus.hpp"
#include "maestro/integra.hpp"
#include "maestro/parser.hpp"

namespace test {

inline std::filesystem::path corpus(const std::string& file) { return maestro::default_corpus_dir() / file; }

inline maestro::Model corpus_model(const std::string& file) { return maestro::load_model(corpus(file)); }

inline maestro::TransformProgram corpus_program(const std::string& file) {
  return maestro::load_integra(corpus(file).string());
}

/// Base model with the named corpus programs composed and applied.
inline maestro::Model composed(const std::string& base, const std::vector<std::string>& programs) {
  std::vector<maestro::TransformProgram> ps;
  for (const std::string& p : programs) ps.push_back(corpus_program(p));
  return maestro::apply(corpus_model(base), maestro::compose(ps));
}

/// Minimal one-event model text; `events` is spliced into the Events section.
inline std::string model_text(const std::string& types, const std::string& instances, const std::string& events,
                              const std::string& tail = "MaxSteps: 4\nIntWidth: 8\n") {
  return "MachineState:\n  - TypeSpec:\n" + types + "  - InstanceSpec:\n" + instances + "Events:\n" + events + tail;
}

inline std::string event_text(const std::string& name, const std::string& triggers, const std::string& changes,
                              unsigned delay = 0, bool at_start = false, const std::string& data = "None") {
  return "  - Name: \"" + name + "\"\n    CarriesData: \"" + data + "\"\n    TriggersEvent: \"" + triggers +
         "\"\n    StateChanges: \"" + changes + "\"\n    TimingDelay: \"" + std::to_string(delay) +
         "\"\n    PresentAtStart: \"" + (at_start ? "Yes" : "No") + "\"\n";
}

}  // namespace test
