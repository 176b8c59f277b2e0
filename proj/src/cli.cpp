#include "maestro/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "maestro/alloy.hpp"
#include "maestro/checker.hpp"
#include "maestro/engine.hpp"
#include "maestro/integra.hpp"
#include "maestro/parser.hpp"
#include "maestro/printer.hpp"
#include "maestro/trace_io.hpp"
#include "maestro/validate.hpp"

namespace maestro {
namespace {

/// Raised for problems that map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!f) throw UsageError("error writing '" + path + "'");
}

Model load_for_cli(const std::string& path, std::ostream& err) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file '" + path + "'");
  Model m = load_model(path);
  for (const Diagnostic& d : validate(m)) {
    if (d.severity == Severity::Warning) err << d.str() << "\n";
  }
  return m;
}

std::uint64_t default_limit() {
  if (const char* env = std::getenv(kLimitEnv); env != nullptr && *env != '\0') {
    const std::string s = env;
    if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 19) {
      throw UsageError(std::string(kLimitEnv) + " must be a positive integer");
    }
    return std::stoull(s);
  }
  return kDefaultConfigLimit;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string model;
  bool json = false;
  std::uint64_t limit = 0;
  std::string trace_out;
  unsigned jobs = 1;
  bool no_timing = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const Model m = load_for_cli(a.model, err);
  CheckOptions opts;
  opts.limit = a.limit != 0 ? a.limit : default_limit();
  opts.jobs = a.jobs;
  const CheckReport r = check(m, opts);
  if (a.json) {
    out << report_to_json(r, !a.no_timing).dump(2) << "\n";
  } else {
    out << report_to_text(r, !a.no_timing);
    if (!r.all_hold()) out << "\n" << explain(r);
  }
  if (!a.trace_out.empty()) {
    for (const AssertionResult& res : r.results) {
      if (res.witness) {
        write_text(a.trace_out, trace_to_json(*res.witness).dump(2) + "\n");
        err << "witness for " << res.name << " written to " << a.trace_out << "\n";
        break;
      }
    }
  }
  return r.all_hold() ? kExitHolds : kExitFails;
}

// ---------------------------------------------------------------------------

struct ComposeArgs {
  std::string base;
  std::vector<std::string> transforms;
  std::string out;
  std::vector<std::string> matrix;
  unsigned jobs = 1;
  std::uint64_t limit = 0;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    parts.push_back(item.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<TransformProgram> load_programs(const std::vector<std::string>& paths) {
  std::vector<TransformProgram> out;
  for (const std::string& p : paths) {
    if (!std::filesystem::exists(p)) throw UsageError("no such file '" + p + "'");
    out.push_back(load_integra(p));
  }
  return out;
}

int cmd_compose(const ComposeArgs& a, std::ostream& out, std::ostream& err) {
  const Model base = load_for_cli(a.base, err);
  const std::vector<TransformProgram> shared = load_programs(a.transforms);

  if (a.matrix.empty()) {
    if (a.out.empty()) throw UsageError("compose needs -o OUT (or --matrix)");
    const TransformProgram program = compose(shared);
    const Model composed = apply(base, program);
    write_text(a.out, write_model(composed));
    out << "wrote " << a.out << ": " << composed.events.size() << " events, " << composed.assertions.size()
        << " assertions, " << program.loc() << " transform lines\n";
    return kExitHolds;
  }

  // Each --matrix entry is one more transform set on top of the shared ones.
  struct Row {
    std::string label;
    std::optional<CheckReport> report;
    std::string error;
  };
  CheckOptions opts;
  opts.limit = a.limit != 0 ? a.limit : default_limit();
  auto run_one = [&](std::size_t i) {
    Row row;
    std::vector<std::string> paths = a.transforms;
    for (const std::string& p : split_list(a.matrix[i])) paths.push_back(p);
    for (const std::string& p : paths) {
      row.label += (row.label.empty() ? "" : " + ") + std::filesystem::path(p).stem().string();
    }
    if (row.label.empty()) row.label = "(baseline)";
    try {
      const Model composed = apply(base, compose(load_programs(paths)));
      if (!a.out.empty()) {
        const std::filesystem::path o(a.out);
        write_text((o.parent_path() / (o.stem().string() + "-" + std::to_string(i + 1) + o.extension().string()))
                       .string(),
                   write_model(composed));
      }
      row.report = check(composed, opts);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };

  std::vector<Row> rows(a.matrix.size());
  if (a.jobs <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = run_one(i);
  } else {
    for (std::size_t start = 0; start < rows.size(); start += a.jobs) {
      std::vector<std::future<Row>> batch;
      for (std::size_t i = start; i < std::min(rows.size(), start + a.jobs); ++i) {
        batch.push_back(std::async(std::launch::async, run_one, i));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) rows[start + k] = batch[k].get();
    }
  }

  int code = kExitHolds;
  for (const Row& row : rows) {
    out << row.label << "\n";
    if (!row.error.empty()) {
      out << "  ERROR  " << row.error << "\n";
      code = kExitError;
      continue;
    }
    for (const AssertionResult& res : row.report->results) {
      out << "  " << (res.verdict == Verdict::Holds ? "HOLDS" : "FAILS") << "  " << res.name;
      if (res.verdict == Verdict::Fails) out << " (step " << res.failing_step << ")";
      out << "\n";
    }
    if (row.report->vacuous()) out << "  (vacuous: no initial state admitted)\n";
    if (!row.report->all_hold() && code == kExitHolds) code = kExitFails;
  }
  return code;
}

// ---------------------------------------------------------------------------

struct TraceArgs {
  std::string model;
  std::uint64_t steps = 0;
  std::vector<std::string> sets;
  bool json = false;
  bool no_stutter = false;
};

int cmd_trace(const TraceArgs& a, std::ostream& out, std::ostream& err) {
  const Model m = load_for_cli(a.model, err);
  // Fields default to their pinned value (or 0); --set overrides.
  const std::vector<FieldInfo> fields = m.fields();
  Assignment values = assignment_for(m, free_bits(m), 0);
  for (const std::string& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects inst.field=value, got '" + s + "'");
    const StateKey key = parse_state_key(s.substr(0, eq));
    const std::string v = s.substr(eq + 1);
    if (v.empty() || v.size() > 19 || v.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("--set value must be a non-negative integer, got '" + v + "'");
    }
    bool found = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].key == key) {
        values[i] = BitVecValue(fields[i].width, std::stoull(v));
        found = true;
      }
    }
    if (!found) throw UsageError("unknown state field '" + key.str() + "'");
  }
  EngineConfig cfg = EngineConfig::from(m);
  if (a.steps != 0) cfg.max_steps = a.steps;
  cfg.stutter_to_max = !a.no_stutter;
  const Trace t = run_trace(m, values, cfg);
  if (a.json) {
    out << trace_to_json(t).dump(2) << "\n";
  } else {
    out << trace_to_text(t) << "\nevent tree:\n" << render_event_tree(t);
  }
  return kExitHolds;
}

// ---------------------------------------------------------------------------

struct EmitArgs {
  std::string model;
  std::string out;
  std::string lib = "bitvector";
};

int cmd_emit(const EmitArgs& a, std::ostream& out, std::ostream& err) {
  const Model m = load_for_cli(a.model, err);
  AlloyOptions opts;
  opts.bitvector_lib = a.lib;
  const AlloyOutput res = emit_alloy(m, opts);
  for (const Diagnostic& d : res.diagnostics) err << "warning: " << d.message << "\n";
  if (a.out.empty() || a.out == "-") {
    out << res.text;
  } else {
    write_text(a.out, res.text);
    out << "wrote " << a.out << "\n";
  }
  return kExitHolds;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file '" + path + "'");
  const Model m = parse_model_unchecked(read_file(path), path);
  const std::vector<Diagnostic> diags = validate(m);
  for (const Diagnostic& d : diags) out << d.str() << "\n";
  if (has_errors(diags)) return kExitError;
  out << path << ": ok (" << m.events.size() << " events, " << m.fields().size() << " state fields, "
      << m.assertions.size() << " assertions)\n";
  return kExitHolds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-based modeling and bounded checking of microarchitectural defenses", "maestro"};
  app.require_subcommand(1);

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Check every assertion of a model over all admitted initial states");
  check_cmd->add_option("model", check_args.model, "Model file")->required();
  check_cmd->add_flag("--json", check_args.json, "Print the report as JSON");
  check_cmd->add_option("--limit", check_args.limit,
                        std::string("Maximum configurations to enumerate (default $") + kLimitEnv + " or 65536)")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--trace-out", check_args.trace_out, "Write the first witness trace as JSON");
  check_cmd->add_option("--jobs", check_args.jobs, "Worker threads")->check(CLI::Range(1U, 256U));
  check_cmd->add_flag("--no-timing", check_args.no_timing, "Omit wall time from the report");

  ComposeArgs compose_args;
  auto* compose_cmd = app.add_subcommand("compose", "Apply composed Integra programs to a base model");
  compose_cmd->add_option("base", compose_args.base, "Base model file")->required();
  compose_cmd->add_option("transforms", compose_args.transforms, "Integra programs");
  compose_cmd->add_option("-o,--out", compose_args.out, "Output model file");
  compose_cmd->add_option("--matrix", compose_args.matrix,
                          "Comma-separated transform set to compose and check (repeatable)");
  compose_cmd->add_option("--jobs", compose_args.jobs, "Compositions checked concurrently")
      ->check(CLI::Range(1U, 64U));
  compose_cmd->add_option("--limit", compose_args.limit, "Configuration limit for --matrix checks")
      ->check(CLI::PositiveNumber);

  TraceArgs trace_args;
  auto* trace_cmd = app.add_subcommand("trace", "Run one execution and print the trace and event tree");
  trace_cmd->add_option("model", trace_args.model, "Model file")->required();
  trace_cmd->add_option("--steps", trace_args.steps, "Number of steps (default MaxSteps)")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_option("--set", trace_args.sets, "Initial value inst.field=v (repeatable)");
  trace_cmd->add_flag("--json", trace_args.json, "Print the trace as JSON");
  trace_cmd->add_flag("--no-stutter", trace_args.no_stutter, "Stop at the first quiescent step");

  EmitArgs emit_args;
  auto* emit_cmd = app.add_subcommand("emit-alloy", "Write the model as Alloy source");
  emit_cmd->add_option("model", emit_args.model, "Model file")->required();
  emit_cmd->add_option("-o,--out", emit_args.out, "Output .als file (default stdout)");
  emit_cmd->add_option("--bitvector-lib", emit_args.lib, "Bit-vector module opened on line 1");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Report model diagnostics");
  validate_cmd->add_option("model", validate_path, "Model file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitHolds : kExitError;
  }

  try {
    if (check_cmd->parsed()) return cmd_check(check_args, out, err);
    if (compose_cmd->parsed()) return cmd_compose(compose_args, out, err);
    if (trace_cmd->parsed()) return cmd_trace(trace_args, out, err);
    if (emit_cmd->parsed()) return cmd_emit(emit_args, out, err);
    if (validate_cmd->parsed()) return cmd_validate(validate_path, out);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const IntegraError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace maestro
