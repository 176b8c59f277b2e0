#include "maestro/validate.hpp"

#include <algorithm>
#include <set>

namespace maestro {

namespace {

struct Scope {
  const Model& model;
  const EventSpec* owner = nullptr;  // event whose carried data `self.*` refers to
  bool allow_primed = false;
  const char* what = "";
};

class Validator {
public:
  explicit Validator(const Model& m) : model_(m) {}

  std::vector<Diagnostic> run() {
    check_state();
    check_events();
    check_assertions();
    check_initial();
    check_bounds();
    return std::move(diags_);
  }

private:
  void error(std::string msg, const SourceSpan& span) {
    diags_.push_back({Severity::Error, std::move(msg), span});
  }
  void warning(std::string msg, const SourceSpan& span) {
    diags_.push_back({Severity::Warning, std::move(msg), span});
  }

  void check_width(unsigned w, const std::string& what, const SourceSpan& span) {
    if (w < 1 || w > kMaxBitWidth) {
      error("width of " + what + " must be in [1, 64], got " + std::to_string(w), span);
    }
  }

  void check_state() {
    std::set<std::string> types;
    for (const TypeSpec& t : model_.state.types) {
      if (!types.insert(t.name).second) {
        error("duplicate type '" + t.name + "'", t.span);
      }
      std::set<std::string> fields;
      for (const DataField& f : t.fields) {
        if (!fields.insert(f.name).second) {
          error("duplicate field '" + f.name + "' in type '" + t.name + "'", t.span);
        }
        check_width(f.width, t.name + "." + f.name, t.span);
      }
    }
    std::set<std::string> instances;
    for (const InstanceSpec& i : model_.state.instances) {
      if (!instances.insert(i.name).second) {
        error("duplicate instance '" + i.name + "'", i.span);
      }
      if (model_.state.find_type(i.type) == nullptr) {
        error("instance '" + i.name + "' has unresolved type '" + i.type + "'", i.span);
      }
    }
  }

  void check_expr(const ExprPtr& e, const Scope& scope, const SourceSpan& span) {
    visit_refs(e, refs(scope, span));
  }

  void check_bool(const BoolPtr& b, const Scope& scope, const SourceSpan& span) {
    if (!b) {
      error(std::string("missing condition in ") + scope.what, span);
      return;
    }
    visit_refs(b, refs(scope, span));
  }

  RefVisitor refs(const Scope& scope, const SourceSpan& span) {
    return RefVisitor{
        .state =
            [this, scope, span](const Expr::State& s) {
              if (!model_.state.width_of(s.key)) {
                error("unresolved state reference '" + s.key.str() + "' in " + scope.what, span);
              }
              if (s.primed && !scope.allow_primed) {
                error("primed reference '" + s.key.str() + "'' illegal in " + scope.what, span);
              }
            },
        .data =
            [this, scope, span](const Expr::Data& d) {
              if (scope.owner == nullptr) {
                error("carried-data reference 'self." + d.field + "' illegal in " + scope.what, span);
              } else if (scope.owner->find_data(d.field) == nullptr) {
                error("event '" + scope.owner->name + "' carries no data field '" + d.field + "'",
                      span);
              }
            },
        .time =
            [this, scope, span](const Expr::Time& t) {
              if (t.primed && !scope.allow_primed) {
                error(std::string("primed reference 'time'' illegal in ") + scope.what, span);
              }
            },
        .count =
            [this, scope, span](const Expr::Count& c) {
              if (model_.find_event(c.event) == nullptr) {
                error("unresolved event '" + c.event + "' in count", span);
              }
              if (c.primed && !scope.allow_primed) {
                error("primed count '#" + c.event + "'' illegal in " + scope.what, span);
              }
            },
    };
  }

  void check_events() {
    std::set<std::string> names;
    for (const EventSpec& ev : model_.events) {
      if (!names.insert(ev.name).second) {
        error("duplicate event '" + ev.name + "'", ev.span);
      }
      std::set<std::string> data;
      for (const DataField& d : ev.carried_data) {
        if (!data.insert(d.name).second) {
          error("duplicate carried-data field '" + d.name + "' in event '" + ev.name + "'", ev.span);
        }
        check_width(d.width, ev.name + ".self." + d.name, ev.span);
      }
      if (ev.present_at_start && ev.delay != 0) {
        warning("event '" + ev.name + "' is present at start: delay " + std::to_string(ev.delay) +
                    " forced to 0",
                ev.span);
      }
      const Scope scope{model_, &ev, false, "event clause"};
      for (const TriggerClause& t : ev.triggers) {
        check_bool(t.condition, scope, t.span);
        const EventSpec* target = model_.find_event(t.target);
        if (target == nullptr) {
          error("unresolved event '" + t.target + "' in trigger of '" + ev.name + "'", t.span);
        }
        for (const auto& [field, value] : t.assignments) {
          if (target != nullptr && target->find_data(field) == nullptr) {
            error("event '" + t.target + "' carries no data field '" + field + "'", t.span);
          }
          check_expr(value, scope, t.span);
        }
      }
      for (const StateChangeClause& sc : ev.state_changes) {
        check_bool(sc.condition, scope, sc.span);
        if (!model_.state.width_of(sc.target)) {
          error("unresolved state-change target '" + sc.target.str() + "'", sc.span);
        }
        if (!sc.value) {
          error("state change without a value", sc.span);
        } else {
          check_expr(sc.value, scope, sc.span);
        }
      }
    }
    for (const auto& [event, cap] : model_.instance_caps) {
      if (model_.find_event(event) == nullptr) {
        error("instance cap names unknown event '" + event + "'", {});
      }
      if (cap < 1) {
        error("instance cap of '" + event + "' must be positive", {});
      }
    }
  }

  void check_assertions() {
    std::set<std::string> names;
    for (const Assertion& a : model_.assertions) {
      if (!names.insert(a.name).second) {
        error("duplicate assertion '" + a.name + "'", a.span);
      }
      const bool always = a.mode == AssertionMode::Always;
      check_bool(a.body, Scope{model_, nullptr, always, always ? "ALWAYS assertion" : "FINALLY"},
                 a.span);
    }
  }

  void check_initial() {
    for (const InitialConstraint& c : model_.initial_constraints) {
      check_bool(c.expr, Scope{model_, nullptr, false, "initial constraint"}, c.span);
    }
  }

  void check_bounds() {
    if (model_.max_steps < 1) {
      error("MaxSteps must be at least 1", {});
    }
    if (model_.int_width < 1 || model_.int_width > 63) {
      error("IntWidth must be in [1, 63], got " + std::to_string(model_.int_width), {});
    } else if ((std::uint64_t{1} << model_.int_width) <= model_.max_steps) {
      warning("IntWidth " + std::to_string(model_.int_width) + " cannot represent " +
                  std::to_string(model_.max_steps) + " steps",
              {});
    }
  }

  const Model& model_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Model& model) { return Validator(model).run(); }

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace maestro
