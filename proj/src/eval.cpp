#include "maestro/eval.hpp"

namespace maestro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const EvalFrame& frame(const EvalContext& ctx, bool primed) {
  if (!primed) {
    return ctx.now;
  }
  if (!ctx.next) {
    throw EvalError("primed reference evaluated without a successor step");
  }
  return *ctx.next;
}

}  // namespace

StateLayout::StateLayout(std::vector<FieldInfo> fields) : fields_(std::move(fields)) {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    index_.emplace(fields_[i].key, i);
  }
}

std::optional<std::size_t> StateLayout::index(const StateKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::uint64_t count_deployed(const std::vector<EventInstance>& instances, const std::string& spec) {
  std::uint64_t n = 0;
  for (const EventInstance& inst : instances) {
    if (inst.spec == spec && inst.status != InstanceStatus::Undeployed) {
      ++n;
    }
  }
  return n;
}

BitVecValue evaluate(const ExprPtr& e, const EvalContext& ctx) {
  return std::visit(
      overloaded{
          [&](const Expr::Literal& l) { return BitVecValue(BitVecValue::width_for(l.value), l.value); },
          [&](const Expr::State& s) {
            const auto idx = ctx.layout->index(s.key);
            if (!idx) {
              throw EvalError("unresolved state reference '" + s.key.str() + "'");
            }
            return (*frame(ctx, s.primed).state)[*idx];
          },
          [&](const Expr::Data& d) {
            if (ctx.data == nullptr) {
              throw EvalError("'self." + d.field + "' evaluated outside an event");
            }
            auto it = ctx.data->find(d.field);
            if (it == ctx.data->end()) {
              throw EvalError("unknown carried-data field '" + d.field + "'");
            }
            return it->second;
          },
          [&](const Expr::Time& t) { return BitVecValue(kCounterWidth, frame(ctx, t.primed).time); },
          [&](const Expr::Count& c) {
            const EvalFrame& f = frame(ctx, c.primed);
            const std::uint64_t n = f.instances == nullptr ? 0 : count_deployed(*f.instances, c.event);
            return BitVecValue(kCounterWidth, n);
          },
          [&](const Expr::Binary& b) {
            const BitVecValue l = evaluate(b.lhs, ctx);
            const BitVecValue r = evaluate(b.rhs, ctx);
            return b.op == ArithOp::Add ? l + r : l - r;
          },
      },
      e->node);
}

bool evaluate(const BoolPtr& b, const EvalContext& ctx) {
  return std::visit(overloaded{
                        [&](const BoolExpr::Const& c) { return c.value; },
                        [&](const BoolExpr::Compare& c) {
                          const auto order = compare_unsigned(evaluate(c.lhs, ctx), evaluate(c.rhs, ctx));
                          switch (c.op) {
                            case CmpOp::Eq: return order == 0;
                            case CmpOp::Ne: return order != 0;
                            case CmpOp::Lt: return order < 0;
                            case CmpOp::Le: return order <= 0;
                            case CmpOp::Gt: return order > 0;
                            case CmpOp::Ge: return order >= 0;
                          }
                          return false;
                        },
                        [&](const BoolExpr::Not& n) { return !evaluate(n.operand, ctx); },
                        [&](const BoolExpr::Join& j) {
                          if (j.op == Junction::And) {
                            return evaluate(j.lhs, ctx) && evaluate(j.rhs, ctx);
                          }
                          return evaluate(j.lhs, ctx) || evaluate(j.rhs, ctx);
                        },
                    },
                    b->node);
}

}  // namespace maestro
