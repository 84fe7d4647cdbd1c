#include "slice/interp.hpp"

#include <unordered_map>

namespace slice {

const Value* Env::lookup(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

std::vector<Rational> Trace::positions() const {
  std::vector<Rational> out;
  for (const auto& m : marks) out.push_back(m.position);
  return out;
}

namespace {

class Evaluator {
 public:
  Evaluator(std::span<const PiecewiseValuation> profile, std::span<const MarkPolicy> policies, IteMode mode)
      : profile_(profile), policies_(policies), mode_(mode) {}

  Value run(const Expr& e, int k) {
    switch (e.kind) {
      case ExprKind::Lit: return e.lit;
      case ExprKind::Var: {
        const Value* v = env_.lookup(e.name);
        if (!v) throw std::logic_error(to_string(e.loc) + ": unbound variable " + e.name);
        return *v;
      }
      case ExprKind::Prim: {
        std::vector<Value> args;
        for (const auto& kid : e.kids) {
          args.push_back(run(*kid, k));
          k += fresh(*kid);
        }
        return apply_prim(e.op, args);
      }
      case ExprKind::Let: {
        Value bound = run(*e.kids[0], k);
        env_.push(e.name, std::move(bound));
        Value body = run(*e.kids[1], k + fresh(*e.kids[0]));
        env_.pop();
        return body;
      }
      case ExprKind::Tuple: {
        Value::Tuple elems;
        for (const auto& kid : e.kids) {
          elems.push_back(run(*kid, k));
          k += fresh(*kid);
        }
        return Value::tuple(std::move(elems));
      }
      case ExprKind::Proj: {
        Value t = run(*e.kids[0], k);
        const auto& elems = t.as_tuple();
        if (e.index < 1 || e.index > static_cast<int>(elems.size()))
          throw std::logic_error(to_string(e.loc) + ": projection out of range");
        return elems[e.index - 1];
      }
      case ExprKind::If: {
        const Expr &g = *e.kids[0], &a = *e.kids[1], &b = *e.kids[2];
        bool taken = run(g, k).as_boolean();
        int n1 = fresh(g), n2 = fresh(a);
        Value v = taken ? run(a, k + n1) : run(b, k + n1 + n2);
        if (mode_ == IteMode::impl) trace_.branches.push_back({k + n1 + n2 + fresh(b) + 1, v});
        return v;
      }
      case ExprKind::Cake: return Value::interval(0, 1);
      case ExprKind::Left: return Value::number(run(*e.kids[0], k).as_interval().lo);
      case ExprKind::Right: return Value::number(run(*e.kids[0], k).as_interval().hi);
      case ExprKind::Divide: {
        Interval piece = run(*e.kids[0], k).as_interval();
        Rational cut = run(*e.kids[1], k + fresh(*e.kids[0])).as_number();
        if (cut < piece.lo || cut > piece.hi)
          throw RuntimeError(RuntimeError::Kind::DivOutOfBounds,
                             "cut " + to_string(cut) + " lies outside [" + to_string(piece.lo) + ", " +
                                 to_string(piece.hi) + "]",
                             e.loc);
        return Value::tuple({Value::interval(piece.lo, cut), Value::interval(cut, piece.hi)});
      }
      case ExprKind::Mark: {
        Rational from = run(*e.kids[0], k).as_number();
        int n1 = fresh(*e.kids[0]);
        Rational target = run(*e.kids[1], k + n1).as_number();
        int var = k + n1 + fresh(*e.kids[1]) + 1;
        int a = e.agent.index;
        if (a > static_cast<int>(profile_.size()))
          throw std::invalid_argument("no valuation for agent " + std::to_string(a));
        const MarkPolicy& policy = policies_.size() == 1 ? policies_[0] : policies_[a - 1];
        auto r = mark_of(profile_[a - 1], from, target, policy, var);
        if (!r)
          throw RuntimeError(RuntimeError::Kind::MarkInfeasible,
                             "agent " + std::to_string(a) + " cannot mark value " + to_string(target) + " from " +
                                 to_string(from),
                             e.loc);
        trace_.marks.push_back({var, e.agent, *r});
        return Value::number(*r);
      }
      case ExprKind::Eval: {
        Interval piece = run(*e.kids[0], k).as_interval();
        int a = e.agent.index;
        if (a > static_cast<int>(profile_.size()))
          throw std::invalid_argument("no valuation for agent " + std::to_string(a));
        return Value::number(profile_[a - 1].value_of(piece));
      }
    }
    throw std::logic_error("unknown expression");
  }

  Trace take_trace() { return std::move(trace_); }

 private:
  int fresh(const Expr& e) {
    auto it = fresh_.find(&e);
    if (it != fresh_.end()) return it->second;
    int n = (e.kind == ExprKind::Mark || (e.kind == ExprKind::If && mode_ == IteMode::impl)) ? 1 : 0;
    for (const auto& kid : e.kids) n += fresh(*kid);
    fresh_.emplace(&e, n);
    return n;
  }

  std::span<const PiecewiseValuation> profile_;
  std::span<const MarkPolicy> policies_;
  IteMode mode_;
  Env env_;
  Trace trace_;
  std::unordered_map<const Expr*, int> fresh_;
};

}  // namespace

Evaluation evaluate(const ExprPtr& e, std::span<const PiecewiseValuation> profile,
                    std::span<const MarkPolicy> policies, IteMode numbering) {
  if (policies.empty()) throw std::invalid_argument("at least one mark policy is required");
  if (policies.size() != 1 && policies.size() != profile.size())
    throw std::invalid_argument("expected one mark policy per agent");
  Evaluator ev(profile, policies, numbering);
  Value v = ev.run(*e, 0);
  return {std::move(v), ev.take_trace()};
}

Evaluation evaluate(const Program& p, std::span<const PiecewiseValuation> profile,
                    std::span<const MarkPolicy> policies, IteMode numbering) {
  if (static_cast<int>(profile.size()) != p.agent_count)
    throw std::invalid_argument("protocol has " + std::to_string(p.agent_count) + " agents but the profile has " +
                                std::to_string(profile.size()));
  return evaluate(desugar(p), profile, policies, numbering);
}

}  // namespace slice
