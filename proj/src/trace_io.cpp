#include "maestro/trace_io.hpp"

#include <map>
#include <sstream>

namespace maestro {

std::string format_value(const BitVecValue& v) { return std::to_string(v.bits()); }

namespace {

std::string data_text(const std::map<std::string, BitVecValue>& data) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, value] : data) {
    if (!first) out += ", ";
    first = false;
    out += name + "=" + format_value(value);
  }
  return out + "}";
}

}  // namespace

std::string trace_to_text(const Trace& t) {
  std::ostringstream os;
  for (const StepRecord& s : t.steps) {
    os << "step " << s.step_index << " time " << s.time << (s.stutter ? " stutter" : "") << "\n";
    for (std::size_t i = 0; i < t.fields.size() && i < s.state.size(); ++i) {
      os << "  " << t.fields[i].key.str() << " = " << format_value(s.state[i]) << "\n";
    }
    for (const EventInstance& inst : s.instances) {
      os << "  (" << inst.spec << ", " << inst.event_id << ", " << to_string(inst.status) << ", "
         << inst.parent_id << ", " << inst.reason << ", " << data_text(inst.data) << ")\n";
    }
  }
  if (t.terminated_early) {
    os << "terminated early (quiescent)\n";
  }
  return os.str();
}

nlohmann::json trace_to_json(const Trace& t) {
  using nlohmann::json;
  json fields = json::array();
  for (const FieldInfo& f : t.fields) {
    fields.push_back({{"name", f.key.str()}, {"width", f.width}});
  }
  json initial = json::object();
  for (std::size_t i = 0; i < t.fields.size() && i < t.initial_assignment.size(); ++i) {
    initial[t.fields[i].key.str()] = t.initial_assignment[i].bits();
  }
  json steps = json::array();
  for (const StepRecord& s : t.steps) {
    json state = json::object();
    for (std::size_t i = 0; i < t.fields.size() && i < s.state.size(); ++i) {
      state[t.fields[i].key.str()] = s.state[i].bits();
    }
    json instances = json::array();
    for (const EventInstance& inst : s.instances) {
      json data = json::object();
      for (const auto& [name, value] : inst.data) {
        data[name] = value.bits();
      }
      instances.push_back({{"spec", inst.spec},
                           {"id", inst.event_id},
                           {"status", to_string(inst.status)},
                           {"parent", inst.parent_id},
                           {"reason", inst.reason},
                           {"appearance_time", inst.appearance_time},
                           {"delay", inst.delay},
                           {"data", data}});
    }
    steps.push_back({{"step", s.step_index},
                     {"time", s.time},
                     {"stutter", s.stutter},
                     {"state", state},
                     {"instances", instances}});
  }
  return {{"fields", fields},
          {"initial_assignment", initial},
          {"terminated_early", t.terminated_early},
          {"steps", steps}};
}

std::vector<InstanceHistory> instance_histories(const Trace& t) {
  std::map<std::int64_t, InstanceHistory> by_id;
  for (const StepRecord& s : t.steps) {
    for (const EventInstance& inst : s.instances) {
      auto [it, inserted] = by_id.try_emplace(inst.event_id);
      if (inserted) {
        it->second.instance = inst;
        it->second.first_step = s.step_index;
      }
      if (inst.status == InstanceStatus::Active && !it->second.active_time) {
        it->second.active_time = s.time;
        it->second.active_step = s.step_index;
      }
    }
  }
  std::vector<InstanceHistory> out;
  out.reserve(by_id.size());
  for (auto& [id, h] : by_id) out.push_back(std::move(h));
  return out;
}

std::string render_event_tree(const Trace& t, std::optional<std::uint64_t> highlight_step) {
  const std::vector<InstanceHistory> all = instance_histories(t);
  std::map<std::int64_t, std::vector<const InstanceHistory*>> children;
  std::vector<const InstanceHistory*> roots;
  std::map<std::int64_t, bool> known;
  for (const InstanceHistory& h : all) known[h.instance.event_id] = true;
  for (const InstanceHistory& h : all) {
    if (h.instance.parent_id < 0 || !known.count(h.instance.parent_id)) {
      roots.push_back(&h);
    } else {
      children[h.instance.parent_id].push_back(&h);
    }
  }

  std::ostringstream os;
  auto node = [&](auto&& self, const InstanceHistory* h, const std::string& prefix, bool last,
                  bool root) -> void {
    os << prefix << (root ? "" : (last ? "`- " : "|- ")) << h->instance.spec << " #" << h->instance.event_id
       << "  appear " << h->instance.appearance_time;
    if (h->instance.delay != 0) os << " +" << h->instance.delay;
    if (h->active_time) {
      os << ", active t=" << *h->active_time << " (step " << *h->active_step << ")";
    } else {
      os << ", still pending";
    }
    if (highlight_step && h->active_step && *h->active_step == *highlight_step) {
      os << "  <==";
    }
    os << "\n";
    const auto it = children.find(h->instance.event_id);
    if (it == children.end()) return;
    const std::string child_prefix = prefix + (root ? "" : (last ? "   " : "|  "));
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      self(self, it->second[i], child_prefix, i + 1 == it->second.size(), false);
    }
  };
  for (const InstanceHistory* r : roots) {
    node(node, r, "", true, true);
  }
  if (roots.empty()) {
    os << "(no event instances)\n";
  }
  return os.str();
}

}  // namespace maestro
