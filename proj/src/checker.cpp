#include "maestro/checker.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "maestro/eval.hpp"
#include "maestro/trace_io.hpp"

namespace maestro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// Literal pins `ref = literal` (either side) among top-level conjuncts.
std::map<StateKey, std::uint64_t> pinned_fields(const Model& model) {
  std::map<StateKey, std::uint64_t> pins;
  for (const InitialConstraint& c : model.initial_constraints) {
    for (const BoolPtr& conj : conjuncts(c.expr)) {
      const auto* cmp = std::get_if<BoolExpr::Compare>(&conj->node);
      if (cmp == nullptr || cmp->op != CmpOp::Eq) continue;
      const auto* ls = std::get_if<Expr::State>(&cmp->lhs->node);
      const auto* rs = std::get_if<Expr::State>(&cmp->rhs->node);
      const auto* ll = std::get_if<Expr::Literal>(&cmp->lhs->node);
      const auto* rl = std::get_if<Expr::Literal>(&cmp->rhs->node);
      if (ls != nullptr && rl != nullptr && !ls->primed) {
        pins.try_emplace(ls->key, rl->value);
      } else if (rs != nullptr && ll != nullptr && !rs->primed) {
        pins.try_emplace(rs->key, ll->value);
      }
    }
  }
  return pins;
}

struct Evaluation {
  std::vector<std::optional<std::uint64_t>> first_failure_config;
  std::vector<std::uint64_t> failing_step;
  std::uint64_t admitted = 0;
  std::optional<std::pair<std::uint64_t, std::string>> error;  // (config, message)
};

}  // namespace

std::vector<FreeBit> free_bits(const Model& model) {
  const auto pins = pinned_fields(model);
  std::vector<FreeBit> out;
  for (const FieldInfo& f : model.fields()) {
    if (pins.count(f.key) != 0) continue;
    for (unsigned b = f.width; b-- > 0;) {
      out.push_back({f.key, b});
    }
  }
  return out;
}

Assignment assignment_for(const Model& model, const std::vector<FreeBit>& free, std::uint64_t index) {
  const auto pins = pinned_fields(model);
  const std::vector<FieldInfo> fields = model.fields();
  std::map<StateKey, std::uint64_t> values;
  for (const FieldInfo& f : fields) {
    auto it = pins.find(f.key);
    values[f.key] = it == pins.end() ? 0 : it->second;
  }
  for (std::size_t i = 0; i < free.size(); ++i) {
    const unsigned shift = static_cast<unsigned>(free.size() - 1 - i);
    if (((index >> shift) & 1U) != 0) {
      values[free[i].key] |= std::uint64_t{1} << free[i].bit;
    }
  }
  Assignment a;
  a.reserve(fields.size());
  for (const FieldInfo& f : fields) {
    a.emplace_back(f.width, values[f.key]);
  }
  return a;
}

std::optional<std::uint64_t> first_violation(const Model& model, const Assertion& a, const Trace& t) {
  if (t.steps.empty()) return std::nullopt;
  const StateLayout layout(t.fields);
  auto frame = [](const StepRecord& s) { return EvalFrame{&s.state, s.time, &s.instances}; };
  if (a.mode == AssertionMode::Finally) {
    const StepRecord& last = t.steps.back();
    const EvalContext ctx{&layout, frame(last), std::nullopt, nullptr};
    if (!evaluate(a.body, ctx)) return last.step_index;
    return std::nullopt;
  }
  const bool primed = has_primed(a.body);
  const std::size_t horizon = primed ? t.steps.size() - 1 : t.steps.size();
  for (std::size_t x = 0; x < horizon; ++x) {
    EvalContext ctx{&layout, frame(t.steps[x]), std::nullopt, nullptr};
    if (primed) ctx.next = frame(t.steps[x + 1]);
    if (!evaluate(a.body, ctx)) return t.steps[x].step_index;
  }
  (void)model;
  return std::nullopt;
}

bool CheckReport::all_hold() const {
  return std::all_of(results.begin(), results.end(),
                     [](const AssertionResult& r) { return r.verdict == Verdict::Holds; });
}

const AssertionResult* CheckReport::find(const std::string& name) const {
  for (const AssertionResult& r : results) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

CheckReport check(const Model& model, const CheckOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  CheckReport report;
  report.model = model.source;
  report.fields = model.fields();
  report.free = free_bits(model);

  const std::size_t nfree = report.free.size();
  if (nfree >= 63 || (std::uint64_t{1} << nfree) > options.limit) {
    throw CheckError(CheckError::Kind::EnumerationOverflow,
                     std::to_string(nfree) + " free initial-state bits exceed the configuration limit of " +
                         std::to_string(options.limit));
  }
  const std::uint64_t total = std::uint64_t{1} << nfree;
  report.configs_enumerated = total;

  const std::size_t nasserts = model.assertions.size();
  const EngineConfig config = EngineConfig::from(model);

  // Evaluates configurations [lo, hi) and records the first failure of each assertion.
  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    Evaluation ev;
    ev.first_failure_config.assign(nasserts, std::nullopt);
    ev.failing_step.assign(nasserts, 0);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Assignment a = assignment_for(model, report.free, i);
      Trace t;
      try {
        t = run_trace(model, a, config);
      } catch (const EngineError& e) {
        if (e.kind() == EngineError::Kind::ConstraintViolated) continue;
        ev.error = {i, e.what()};
        return ev;
      } catch (const EvalError& e) {
        ev.error = {i, e.what()};
        return ev;
      }
      ++ev.admitted;
      for (std::size_t k = 0; k < nasserts; ++k) {
        if (ev.first_failure_config[k]) continue;
        if (auto bad = first_violation(model, model.assertions[k], t)) {
          ev.first_failure_config[k] = i;
          ev.failing_step[k] = *bad;
        }
      }
    }
    return ev;
  };

  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::min<std::uint64_t>(total, 256))));
  std::vector<Evaluation> parts(jobs);
  if (jobs == 1) {
    parts[0] = run_range(0, total);
  } else {
    std::vector<std::thread> workers;
    const std::uint64_t chunk = (total + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      const std::uint64_t lo = std::min(total, j * chunk);
      const std::uint64_t hi = std::min(total, lo + chunk);
      workers.emplace_back([&, j, lo, hi] { parts[j] = run_range(lo, hi); });
    }
    for (std::thread& w : workers) w.join();
  }

  // Merge in enumeration order so the earliest failure wins regardless of jobs.
  for (const Evaluation& p : parts) {
    if (p.error) {
      throw CheckError(CheckError::Kind::Engine,
                       "configuration " + std::to_string(p.error->first) + ": " + p.error->second,
                       assignment_for(model, report.free, p.error->first));
    }
    report.configs_admitted += p.admitted;
  }
  for (std::size_t k = 0; k < nasserts; ++k) {
    const Assertion& a = model.assertions[k];
    AssertionResult r;
    r.name = a.name;
    r.mode = a.mode;
    r.configs_explored = report.configs_admitted;
    for (const Evaluation& p : parts) {
      if (!p.first_failure_config[k]) continue;
      r.verdict = Verdict::Fails;
      r.failing_config = *p.first_failure_config[k];
      r.failing_step = p.failing_step[k];
      r.failing_assignment = assignment_for(model, report.free, r.failing_config);
      r.witness = run_trace(model, r.failing_assignment, config);
      break;
    }
    report.results.push_back(std::move(r));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

namespace {

std::string assignment_text(const std::vector<FieldInfo>& fields, const Assignment& a) {
  std::string out;
  for (std::size_t i = 0; i < fields.size() && i < a.size(); ++i) {
    if (i != 0) out += ", ";
    out += fields[i].key.str() + "=" + format_value(a[i]);
  }
  return out;
}

const char* mode_text(AssertionMode m) { return m == AssertionMode::Always ? "ALWAYS" : "FINALLY"; }

}  // namespace

std::string report_to_text(const CheckReport& r, bool include_timing) {
  std::ostringstream os;
  os << "model: " << (r.model.empty() ? "<memory>" : r.model) << "\n";
  os << "free bits: " << r.free.size() << ", configurations: " << r.configs_enumerated
     << ", admitted: " << r.configs_admitted << (r.vacuous() ? " (vacuous: no initial state admitted)" : "")
     << "\n";
  for (const AssertionResult& a : r.results) {
    if (a.verdict == Verdict::Holds) {
      os << "  HOLDS  " << a.name << " (" << mode_text(a.mode) << ", " << a.configs_explored
         << " configurations)\n";
    } else {
      os << "  FAILS  " << a.name << " (" << mode_text(a.mode) << ") at step " << a.failing_step
         << ", configuration " << a.failing_config << "\n";
      os << "         initial: " << assignment_text(r.fields, a.failing_assignment) << "\n";
    }
  }
  std::size_t fails = 0;
  for (const AssertionResult& a : r.results) fails += a.verdict == Verdict::Fails ? 1 : 0;
  os << (fails == 0 ? "all assertions hold" : std::to_string(fails) + " assertion(s) fail") << "\n";
  if (include_timing) {
    os << "wall time: " << std::fixed << std::setprecision(3) << r.wall_seconds << " s\n";
  }
  return os.str();
}

nlohmann::json report_to_json(const CheckReport& r, bool include_timing) {
  using nlohmann::json;
  json results = json::array();
  for (const AssertionResult& a : r.results) {
    json j = {{"name", a.name},
              {"mode", mode_text(a.mode)},
              {"verdict", a.verdict == Verdict::Holds ? "Holds" : "Fails"},
              {"configs_explored", a.configs_explored}};
    if (a.verdict == Verdict::Fails) {
      json init = json::object();
      for (std::size_t i = 0; i < r.fields.size() && i < a.failing_assignment.size(); ++i) {
        init[r.fields[i].key.str()] = a.failing_assignment[i].bits();
      }
      j["failing_step"] = a.failing_step;
      j["failing_config"] = a.failing_config;
      j["initial_assignment"] = init;
      if (a.witness) j["witness"] = trace_to_json(*a.witness);
    }
    results.push_back(std::move(j));
  }
  json free = json::array();
  for (const FreeBit& b : r.free) free.push_back(b.key.str() + "[" + std::to_string(b.bit) + "]");
  json out = {{"model", r.model},
              {"free_bits", free},
              {"configs_enumerated", r.configs_enumerated},
              {"configs_admitted", r.configs_admitted},
              {"vacuous", r.vacuous()},
              {"all_hold", r.all_hold()},
              {"results", results}};
  if (include_timing) out["wall_seconds"] = r.wall_seconds;
  return out;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Restricts a product trace to the instances and fields of one machine.
Trace project(const Trace& t, const std::string& suffix) {
  Trace out;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < t.fields.size(); ++i) {
    if (has_suffix(t.fields[i].key.instance, suffix)) {
      keep.push_back(i);
      out.fields.push_back(t.fields[i]);
    }
  }
  for (std::size_t i : keep) {
    if (i < t.initial_assignment.size()) out.initial_assignment.push_back(t.initial_assignment[i]);
  }
  for (const StepRecord& s : t.steps) {
    StepRecord p;
    p.step_index = s.step_index;
    p.time = s.time;
    p.stutter = s.stutter;
    for (std::size_t i : keep) p.state.push_back(s.state[i]);
    for (const EventInstance& inst : s.instances) {
      if (has_suffix(inst.spec, suffix)) p.instances.push_back(inst);
    }
    out.steps.push_back(std::move(p));
  }
  return out;
}

std::string active_names(const StepRecord& s) {
  std::string out;
  for (const EventInstance& inst : s.instances) {
    if (inst.status != InstanceStatus::Active) continue;
    if (!out.empty()) out += ",";
    out += inst.spec;
  }
  return out.empty() ? "-" : out;
}

std::string strip_suffix(std::string s, const std::string& suffix) {
  if (has_suffix(s, suffix)) s.resize(s.size() - suffix.size());
  return s;
}

}  // namespace

std::string explain(const CheckReport& r) {
  const AssertionResult* failing = nullptr;
  for (const AssertionResult& a : r.results) {
    if (a.verdict == Verdict::Fails) {
      failing = &a;
      break;
    }
  }
  if (failing == nullptr || !failing->witness) {
    return "no counterexample: every assertion holds\n";
  }
  const Trace& t = *failing->witness;
  std::ostringstream os;
  os << "counterexample for " << failing->name << " (" << mode_text(failing->mode) << "), violated at step "
     << failing->failing_step << "\n";
  os << "initial: " << assignment_text(t.fields, t.initial_assignment) << "\n";

  bool product = false;
  for (const StepRecord& s : t.steps) {
    for (const EventInstance& inst : s.instances) {
      product = product || has_suffix(inst.spec, "_m1") || has_suffix(inst.spec, "_m2");
    }
  }
  if (!product) {
    os << "\nevent tree (<== marks instances active at the failing step):\n"
       << render_event_tree(t, failing->failing_step);
    return os.str();
  }

  const Trace m1 = project(t, "_m1");
  const Trace m2 = project(t, "_m2");
  os << "\nmachine m1 event tree:\n" << render_event_tree(m1, failing->failing_step);
  os << "\nmachine m2 event tree:\n" << render_event_tree(m2, failing->failing_step);

  // Side-by-side table of active events and the fields the machines disagree on.
  os << "\nstep  time  | m1 active                      | m2 active                      | differing fields\n";
  for (std::size_t x = 0; x < t.steps.size(); ++x) {
    const StepRecord& a = m1.steps[x];
    const StepRecord& b = m2.steps[x];
    std::string diff;
    for (std::size_t i = 0; i < m1.fields.size(); ++i) {
      const std::string base = strip_suffix(m1.fields[i].key.instance, "_m1");
      for (std::size_t j = 0; j < m2.fields.size(); ++j) {
        if (strip_suffix(m2.fields[j].key.instance, "_m2") == base &&
            m2.fields[j].key.field == m1.fields[i].key.field && a.state[i] != b.state[j]) {
          if (!diff.empty()) diff += " ";
          diff += base + "." + m1.fields[i].key.field + "=" + format_value(a.state[i]) + "/" +
                  format_value(b.state[j]);
        }
      }
    }
    std::string m1a = active_names(a);
    std::string m2a = active_names(b);
    os << std::left << std::setw(5) << t.steps[x].step_index << " " << std::setw(5) << t.steps[x].time
       << " | " << std::setw(30) << m1a << " | " << std::setw(30) << m2a << " | " << (diff.empty() ? "-" : diff)
       << (t.steps[x].step_index == failing->failing_step ? "   <== assertion violated" : "") << "\n";
  }
  return os.str();
}

}  // namespace maestro
