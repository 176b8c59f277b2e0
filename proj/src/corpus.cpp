#include "maestro/corpus.hpp"

#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

#include "maestro/parser.hpp"

#ifndef MAESTRO_CORPUS_DIR
#define MAESTRO_CORPUS_DIR "corpus"
#endif

namespace maestro {

const char* to_string(CorpusEntry::Kind k) noexcept {
  switch (k) {
    case CorpusEntry::Kind::Model: return "model";
    case CorpusEntry::Kind::Transform: return "transform";
    case CorpusEntry::Kind::ExpectedVerdict: return "expected-verdict";
  }
  return "?";
}

std::filesystem::path default_corpus_dir() {
  if (const char* env = std::getenv("MAESTRO_CORPUS_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return MAESTRO_CORPUS_DIR;
}

std::vector<CorpusEntry> corpus_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path file = dir / "manifest.json";
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
  std::vector<CorpusEntry> out;
  for (const auto& j : doc.at("entries")) {
    CorpusEntry e;
    e.id = j.at("id").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "model") {
      e.kind = CorpusEntry::Kind::Model;
    } else if (kind == "transform") {
      e.kind = CorpusEntry::Kind::Transform;
    } else if (kind == "expected-verdict") {
      e.kind = CorpusEntry::Kind::ExpectedVerdict;
    } else {
      throw std::runtime_error(file.string() + ": entry '" + e.id + "' has unknown kind '" + kind + "'");
    }
    e.path = j.value("path", "");
    e.description = j.value("description", "");
    e.model = j.value("model", "");
    e.transforms = j.value("transforms", std::vector<std::string>{});
    e.verdicts = j.value("verdicts", std::map<std::string, std::string>{});
    out.push_back(std::move(e));
  }
  for (const CorpusEntry& e : out) {
    if (e.kind != CorpusEntry::Kind::ExpectedVerdict) continue;
    const CorpusEntry* m = find_entry(out, e.model);
    if (m == nullptr || m->kind != CorpusEntry::Kind::Model) {
      throw std::runtime_error("expected verdict '" + e.id + "' names unknown model '" + e.model + "'");
    }
    for (const std::string& t : e.transforms) {
      const CorpusEntry* te = find_entry(out, t);
      if (te == nullptr || te->kind != CorpusEntry::Kind::Transform) {
        throw std::runtime_error("expected verdict '" + e.id + "' names unknown transform '" + t + "'");
      }
    }
    for (const auto& [name, verdict] : e.verdicts) {
      if (verdict != "Holds" && verdict != "Fails") {
        throw std::runtime_error("expected verdict '" + e.id + "': bad verdict '" + verdict + "' for " + name);
      }
    }
  }
  return out;
}

const CorpusEntry* find_entry(const std::vector<CorpusEntry>& entries, const std::string& id) {
  for (const CorpusEntry& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Model build_composition(const std::vector<CorpusEntry>& entries, const CorpusEntry& expected,
                        const std::filesystem::path& dir) {
  const CorpusEntry* m = find_entry(entries, expected.model);
  if (m == nullptr) throw std::runtime_error("unknown model '" + expected.model + "'");
  const Model base = load_model(dir / m->path);
  std::vector<TransformProgram> programs;
  for (const std::string& id : expected.transforms) {
    const CorpusEntry* t = find_entry(entries, id);
    if (t == nullptr) throw std::runtime_error("unknown transform '" + id + "'");
    programs.push_back(load_integra((dir / t->path).string()));
  }
  return apply(base, compose(programs));
}

}  // namespace maestro
