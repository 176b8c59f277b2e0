#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "maestro/ast.hpp"
#include "maestro/integra.hpp"

namespace maestro {

struct CorpusEntry {
  enum class Kind { Model, Transform, ExpectedVerdict };

  std::string id;
  Kind kind = Kind::Model;
  std::string path;  // relative to the corpus directory; empty for expected verdicts
  std::string description;
  // Expected-verdict entries only.
  std::string model;                           // id of a model entry
  std::vector<std::string> transforms;         // ids of transform entries, composed together
  std::map<std::string, std::string> verdicts; // assertion name -> "Holds" | "Fails"
};

[[nodiscard]] const char* to_string(CorpusEntry::Kind k) noexcept;

/// $MAESTRO_CORPUS_DIR if set, else the corpus directory of the source tree.
[[nodiscard]] std::filesystem::path default_corpus_dir();

/// Reads `manifest.json` in `dir` and checks that every expected-verdict
/// entry names models and transforms present in the manifest.
[[nodiscard]] std::vector<CorpusEntry> corpus_manifest(const std::filesystem::path& dir = default_corpus_dir());

[[nodiscard]] const CorpusEntry* find_entry(const std::vector<CorpusEntry>& entries, const std::string& id);

/// Base model of an expected-verdict entry with its transforms applied.
[[nodiscard]] Model build_composition(const std::vector<CorpusEntry>& entries, const CorpusEntry& expected,
                                      const std::filesystem::path& dir = default_corpus_dir());

}  // namespace maestro
