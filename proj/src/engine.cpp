#include "maestro/engine.hpp"

#include <algorithm>
#include <limits>

namespace maestro {

const char* to_string(EngineError::Kind k) noexcept {
  switch (k) {
    case EngineError::Kind::ConstraintViolated: return "ConstraintViolated";
    case EngineError::Kind::IncompleteAssignment: return "IncompleteAssignment";
    case EngineError::Kind::WriteConflict: return "WriteConflict";
    case EngineError::Kind::InstanceOverflow: return "InstanceOverflow";
  }
  return "?";
}

namespace {

void check_caps(const Model& model, const std::vector<EventInstance>& instances, std::uint64_t step) {
  std::map<std::string, unsigned> counts;
  for (const EventInstance& inst : instances) {
    const unsigned n = ++counts[inst.spec];
    if (n > model.cap_of(inst.spec)) {
      throw EngineError(EngineError::Kind::InstanceOverflow,
                        "step " + std::to_string(step) + ": more than " +
                            std::to_string(model.cap_of(inst.spec)) + " instances of '" + inst.spec +
                            "' deployed",
                        step);
    }
  }
}

}  // namespace

Assignment to_assignment(const Model& model, const std::map<StateKey, BitVecValue>& values) {
  Assignment out;
  for (const FieldInfo& f : model.fields()) {
    auto it = values.find(f.key);
    if (it == values.end()) {
      throw EngineError(EngineError::Kind::IncompleteAssignment,
                        "initial assignment is missing '" + f.key.str() + "'");
    }
    out.push_back(it->second.resized(f.width));
  }
  return out;
}

StepRecord initial_step(const Model& model, const std::map<StateKey, BitVecValue>& assignment) {
  return initial_step(model, to_assignment(model, assignment));
}

StepRecord initial_step(const Model& model, const Assignment& assignment) {
  const StateLayout layout = StateLayout::of(model);
  if (assignment.size() != layout.size()) {
    throw EngineError(EngineError::Kind::IncompleteAssignment,
                      "initial assignment has " + std::to_string(assignment.size()) + " values, model has " +
                          std::to_string(layout.size()) + " fields");
  }
  StepRecord s;
  s.step_index = 0;
  s.time = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i].width() != layout.fields()[i].width) {
      throw EngineError(EngineError::Kind::IncompleteAssignment,
                        "value for '" + layout.fields()[i].key.str() + "' has width " +
                            std::to_string(assignment[i].width()) + ", expected " +
                            std::to_string(layout.fields()[i].width));
    }
  }
  s.state = assignment;
  for (const EventSpec& ev : model.events) {
    if (!ev.present_at_start) {
      continue;
    }
    EventInstance inst;
    inst.spec = ev.name;
    inst.status = InstanceStatus::Active;
    inst.event_id = s.next_event_id++;
    for (const DataField& f : ev.carried_data) {
      inst.data.emplace(f.name, BitVecValue(f.width, 0));
    }
    s.instances.push_back(std::move(inst));
  }
  check_caps(model, s.instances, 0);

  EvalContext ctx{&layout, {&s.state, s.time, &s.instances}, std::nullopt, nullptr};
  for (std::size_t i = 0; i < model.initial_constraints.size(); ++i) {
    const InitialConstraint& c = model.initial_constraints[i];
    if (!evaluate(c.expr, ctx)) {
      const std::string label = c.name.empty() ? "#" + std::to_string(i + 1) : "'" + c.name + "'";
      throw EngineError(EngineError::Kind::ConstraintViolated,
                        "initial assignment violates constraint " + label);
    }
  }
  return s;
}

bool is_quiescent(const StepRecord& s) {
  return std::none_of(s.instances.begin(), s.instances.end(),
                      [](const EventInstance& i) { return i.status != InstanceStatus::Undeployed; });
}

StepRecord step(const Model& model, const StepRecord& current) {
  const StateLayout layout = StateLayout::of(model);
  StepRecord next;
  next.step_index = current.step_index + 1;
  next.state = current.state;
  next.next_event_id = current.next_event_id;

  struct Deployment {
    const EventSpec* spec;
    EventInstance inst;
  };
  std::vector<Deployment> children;
  std::vector<EventInstance> pending;
  bool any_active = false;

  // Pending writes per field index, with the clause that produced them for diagnostics.
  std::map<std::size_t, std::pair<BitVecValue, std::string>> writes;

  for (const EventInstance& inst : current.instances) {
    if (inst.status == InstanceStatus::Pending) {
      pending.push_back(inst);
      continue;
    }
    if (inst.status != InstanceStatus::Active) {
      continue;
    }
    any_active = true;
    const EventSpec* spec = model.find_event(inst.spec);
    if (spec == nullptr) {
      throw EvalError("instance of unknown event '" + inst.spec + "'");
    }
    const EvalContext ctx{&layout, {&current.state, current.time, &current.instances}, std::nullopt, &inst.data};

    for (std::size_t ci = 0; ci < spec->triggers.size(); ++ci) {
      const TriggerClause& clause = spec->triggers[ci];
      if (!evaluate(clause.condition, ctx)) {
        continue;
      }
      const EventSpec* target = model.find_event(clause.target);
      if (target == nullptr) {
        throw EvalError("trigger of unknown event '" + clause.target + "'");
      }
      EventInstance child;
      child.spec = target->name;
      child.delay = target->effective_delay();
      child.reason = static_cast<int>(ci);
      child.parent_id = inst.event_id;
      for (const DataField& f : target->carried_data) {
        auto a = clause.assignments.find(f.name);
        const std::uint64_t bits = a == clause.assignments.end() ? 0 : evaluate(a->second, ctx).bits();
        child.data.emplace(f.name, BitVecValue(f.width, bits));
      }
      children.push_back({target, std::move(child)});
    }

    for (const StateChangeClause& sc : spec->state_changes) {
      if (!evaluate(sc.condition, ctx)) {
        continue;
      }
      const auto idx = layout.index(sc.target);
      if (!idx) {
        throw EvalError("state change of unknown field '" + sc.target.str() + "'");
      }
      const BitVecValue value = evaluate(sc.value, ctx).resized(layout.fields()[*idx].width);
      const std::string origin = inst.spec + " #" + std::to_string(inst.event_id);
      auto [it, inserted] = writes.try_emplace(*idx, value, origin);
      if (!inserted && it->second.first != value) {
        throw EngineError(EngineError::Kind::WriteConflict,
                          "step " + std::to_string(current.step_index) + ": conflicting writes to '" +
                              sc.target.str() + "' (" + std::to_string(it->second.first.bits()) + " from " +
                              it->second.second + ", " + std::to_string(value.bits()) + " from " + origin + ")",
                          current.step_index);
      }
    }
  }

  for (const auto& [idx, write] : writes) {
    next.state[idx] = write.first;
  }

  // Minimal time advance consistent with the event timeline.
  const bool deployed_or_active = any_active || !children.empty();
  if (deployed_or_active || pending.empty()) {
    next.time = current.time + 1;
    next.stutter = !deployed_or_active && pending.empty();
  } else {
    std::uint64_t earliest = std::numeric_limits<std::uint64_t>::max();
    for (const EventInstance& p : pending) {
      earliest = std::min(earliest, p.appearance_time + p.delay);
    }
    next.time = std::max(current.time + 1, earliest);
  }

  for (EventInstance& p : pending) {
    if (next.time >= p.appearance_time + p.delay) {
      p.status = InstanceStatus::Active;
    }
    next.instances.push_back(std::move(p));
  }
  for (Deployment& d : children) {
    d.inst.appearance_time = next.time;
    d.inst.event_id = next.next_event_id++;
    d.inst.status = d.inst.delay == 0 ? InstanceStatus::Active : InstanceStatus::Pending;
    next.instances.push_back(std::move(d.inst));
  }
  std::sort(next.instances.begin(), next.instances.end(),
            [](const EventInstance& a, const EventInstance& b) { return a.event_id < b.event_id; });
  check_caps(model, next.instances, next.step_index);
  return next;
}

Trace run_trace(const Model& model, const Assignment& assignment, const EngineConfig& config) {
  if (config.max_steps < 1) {
    throw std::invalid_argument("max_steps must be at least 1");
  }
  Trace t;
  t.fields = model.fields();
  t.initial_assignment = assignment;
  t.steps.push_back(initial_step(model, assignment));
  while (t.steps.back().step_index + 1 < config.max_steps) {
    if (!config.stutter_to_max && is_quiescent(t.steps.back())) {
      t.terminated_early = true;
      break;
    }
    t.steps.push_back(step(model, t.steps.back()));
  }
  return t;
}

std::uint64_t non_stutter_steps(const Trace& t) {
  return static_cast<std::uint64_t>(
      std::count_if(t.steps.begin(), t.steps.end(), [](const StepRecord& s) { return !s.stutter; }));
}

}  // namespace maestro
