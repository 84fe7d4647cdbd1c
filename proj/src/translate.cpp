#include "slice/translate.hpp"

#include <limits>
#include <stdexcept>

namespace slice {

using namespace logic;

namespace {

class Translator {
 public:
  Translator(IteMode mode, const TranslateOptions& opts) : mode_(mode), opts_(opts) {}

  ConstraintTriple run(int k, const Expr& e) {
    switch (e.kind) {
      case ExprKind::Lit: return {k, fm::top(), tm::constant(e.lit)};
      case ExprKind::Var: return {k, fm::top(), tm::x(e.name)};
      case ExprKind::Cake: return {k, fm::top(), tm::constant(Value::interval(0, 1))};
      case ExprKind::Prim:
      case ExprKind::Tuple: {
        auto [next, sides, results] = sequence(k, e.kids);
        TermPtr r = e.kind == ExprKind::Prim ? tm::op(e.op, results) : tm::tuple(results);
        return {next, fm::conj(sides), r};
      }
      case ExprKind::Proj:
      case ExprKind::Left:
      case ExprKind::Right:
      case ExprKind::Eval: {
        ConstraintTriple a = run(k, *e.kids[0]);
        TermPtr r = e.kind == ExprKind::Proj   ? tm::proj(e.index, a.result)
                    : e.kind == ExprKind::Left  ? tm::left(a.result)
                    : e.kind == ExprKind::Right ? tm::right(a.result)
                                                : tm::nu(e.agent.index, a.result);
        return {a.next, a.side, r};
      }
      case ExprKind::If: {
        ConstraintTriple g = run(k, *e.kids[0]);
        ConstraintTriple a = run(g.next, *e.kids[1]);
        ConstraintTriple b = run(a.next, *e.kids[2]);
        FormulaPtr is_true = fm::eq(g.result, tm::constant(Value::boolean(true)));
        FormulaPtr is_false = fm::eq(g.result, tm::constant(Value::boolean(false)));
        if (mode_ == IteMode::core) {
          FormulaPtr branches = fm::disj(fm::conj(is_true, a.side), fm::conj(is_false, b.side));
          return {b.next, fm::conj(g.side, branches), tm::ite(g.result, a.result, b.result)};
        }
        int y = b.next + 1;
        TermPtr fresh = tm::y(y);
        FormulaPtr branches = fm::disj(fm::conj({is_true, a.side, fm::eq(fresh, a.result)}),
                                       fm::conj({is_false, b.side, fm::eq(fresh, b.result)}));
        return {y, fm::conj(branches, g.side), fresh};
      }
      case ExprKind::Let: {
        ConstraintTriple a = run(k, *e.kids[0]);
        ConstraintTriple b = run(a.next, *e.kids[1]);
        Substitution s = Substitution::single(e.name, a.result);
        return {b.next, fm::conj(a.side, logic::apply(b.side, s)), logic::apply(b.result, s)};
      }
      case ExprKind::Divide: {
        ConstraintTriple a = run(k, *e.kids[0]);
        ConstraintTriple b = run(a.next, *e.kids[1]);
        TermPtr lo = tm::left(a.result), hi = tm::right(a.result);
        FormulaPtr side = fm::conj({a.side, b.side, fm::ge(b.result, lo), fm::ge(hi, b.result)});
        TermPtr r = tm::tuple({tm::interval(lo, b.result), tm::interval(b.result, hi)});
        return {b.next, side, r};
      }
      case ExprKind::Mark: {
        ConstraintTriple a = run(k, *e.kids[0]);
        ConstraintTriple b = run(a.next, *e.kids[1]);
        int y = b.next + 1;
        TermPtr fresh = tm::y(y);
        int agent = e.agent.index;
        std::vector<FormulaPtr> parts{a.side, b.side};
        if (opts_.mark_range) {
          parts.push_back(fm::ge(fresh, a.result));
          parts.push_back(fm::ge(tm::num(1), fresh));
        }
        if (!opts_.drop_mark_equality)
          parts.push_back(fm::eq(tm::nu(agent, tm::interval(a.result, fresh)), b.result));
        parts.push_back(fm::ge(tm::nu(agent, tm::interval(a.result, tm::num(1))), b.result));
        return {y, fm::conj(parts), fresh};
      }
    }
    throw std::logic_error("unknown expression");
  }

 private:
  struct Seq {
    int next;
    std::vector<FormulaPtr> sides;
    std::vector<TermPtr> results;
  };

  Seq sequence(int k, const std::vector<ExprPtr>& kids) {
    Seq s{k, {}, {}};
    for (const auto& kid : kids) {
      ConstraintTriple t = run(s.next, *kid);
      s.next = t.next;
      s.sides.push_back(t.side);
      s.results.push_back(t.result);
    }
    return s;
  }

  IteMode mode_;
  TranslateOptions opts_;
};

void collect_sorts(int k, const ExprPtr& e, IteMode mode, TyCtx& ctx, std::map<int, Ty>& out) {
  int next = k;
  if (e->kind == ExprKind::Let) {
    collect_sorts(k, e->kids[0], mode, ctx, out);
    Ty bound = infer(e->kids[0], ctx);
    ctx.push(e->name, bound);
    collect_sorts(k + count_fresh(e->kids[0], mode), e->kids[1], mode, ctx, out);
    ctx.pop();
    return;
  }
  for (const auto& kid : e->kids) {
    collect_sorts(next, kid, mode, ctx, out);
    next += count_fresh(kid, mode);
  }
  if (e->kind == ExprKind::Mark) out[next + 1] = Ty::pos();
  if (e->kind == ExprKind::If && mode == IteMode::impl) out[next + 1] = infer(e, ctx);
}

std::vector<Binder> y_binders(const std::set<int>& ys, const std::map<int, Ty>& sorts) {
  std::vector<Binder> out;
  for (int y : ys) {
    auto it = sorts.find(y);
    if (it == sorts.end()) throw std::logic_error("no sort for fresh variable y" + std::to_string(y));
    out.push_back({Var::y(y), it->second});
  }
  return out;
}

class Progress {
 public:
  Progress(const ExprPtr& root, IteMode mode, const TranslateOptions& opts, std::vector<Obligation>* out)
      : mode_(mode), opts_(opts), out_(out), sorts_(fresh_sorts(0, root, mode)) {}

  FormulaPtr ef(int k, const ExprPtr& e, const FormulaPtr& b, const Substitution& s, TyCtx& ctx) {
    switch (e->kind) {
      case ExprKind::Lit:
      case ExprKind::Var:
      case ExprKind::Cake: return fm::top();
      case ExprKind::Mark:
      case ExprKind::Divide: {
        const ExprPtr &e1 = e->kids[0], &e2 = e->kids[1];
        FormulaPtr f1 = ef(k, e1, b, s, ctx);
        FormulaPtr f2 = ef(k + count_fresh(e1, mode_), e2, b, s, ctx);
        return fm::conj({f1, f2, obligation(k, *e, b, s, ctx)});
      }
      case ExprKind::If: {
        const ExprPtr &g = e->kids[0], &t = e->kids[1], &f = e->kids[2];
        FormulaPtr fg = ef(k, g, b, s, ctx);
        ConstraintTriple tg = translate(k, g, mode_, opts_);
        FormulaPtr side = logic::apply(tg.side, s);
        FormulaPtr bt = fm::conj({logic::apply(fm::eq(tg.result, tm::constant(Value::boolean(true))), s), side, b});
        FormulaPtr bf = fm::conj({logic::apply(fm::eq(tg.result, tm::constant(Value::boolean(false))), s), side, b});
        int n1 = count_fresh(g, mode_);
        FormulaPtr ft = ef(k + n1, t, bt, s, ctx);
        FormulaPtr ff = ef(k + n1 + count_fresh(t, mode_), f, bf, s, ctx);
        return fm::conj({fg, ft, ff});
      }
      case ExprKind::Let: {
        const ExprPtr &e1 = e->kids[0], &e2 = e->kids[1];
        FormulaPtr f1 = ef(k, e1, b, s, ctx);
        ConstraintTriple t1 = translate(k, e1, mode_, opts_);
        FormulaPtr b2 = fm::conj(b, logic::apply(t1.side, s));
        Substitution s2 = s.prepend(e->name, t1.result);
        ctx.push(e->name, infer(e1, ctx));
        FormulaPtr f2 = ef(k + count_fresh(e1, mode_), e2, b2, s2, ctx);
        ctx.pop();
        return fm::conj(f1, f2);
      }
      default: {
        std::vector<FormulaPtr> parts;
        int next = k;
        for (const auto& kid : e->kids) {
          parts.push_back(ef(next, kid, b, s, ctx));
          next += count_fresh(kid, mode_);
        }
        return fm::conj(parts);
      }
    }
  }

 private:
  FormulaPtr obligation(int k, const Expr& e, const FormulaPtr& b, const Substitution& s, TyCtx& ctx) {
    const ExprPtr &e1 = e.kids[0], &e2 = e.kids[1];
    ExprPtr pair = ex::tuple({e1, e2});
    Ty ret_sort = Ty::product({infer(e1, ctx), infer(e2, ctx)});
    TermPtr ret = tm::ret(++ret_counter_);
    FormulaPtr c = logic::apply(constraint_of(k, pair, ret, mode_, opts_), s);
    FormulaPtr hyp = fm::conj(c, b);
    TermPtr first = tm::proj(1, ret), second = tm::proj(2, ret);
    FormulaPtr goal;
    Obligation::Kind kind;
    if (e.kind == ExprKind::Mark) {
      kind = Obligation::Kind::mark;
      goal = fm::conj(fm::ge(tm::nu(e.agent.index, tm::interval(first, tm::num(1))), second),
                      fm::ge(second, tm::num(0)));
    } else {
      kind = Obligation::Kind::divide;
      goal = fm::conj(fm::ge(second, tm::left(first)), fm::ge(tm::right(first), second));
    }
    std::vector<Binder> binders{{Var::ret(ret_counter_), ret_sort}};
    for (auto& bd : y_binders(free_ys(hyp), sorts_)) binders.push_back(bd);
    FormulaPtr f = fm::forall(std::move(binders), fm::implies(hyp, goal));
    if (out_) out_->push_back({kind, e.loc, f});
    return f;
  }

  IteMode mode_;
  TranslateOptions opts_;
  std::vector<Obligation>* out_;
  std::map<int, Ty> sorts_;
  int ret_counter_ = 0;
};

}  // namespace

ConstraintTriple translate(int k, const ExprPtr& e, IteMode mode, const TranslateOptions& opts) {
  return Translator(mode, opts).run(k, *e);
}

FormulaPtr constraint_of(int k, const ExprPtr& e, const TermPtr& t, IteMode mode, const TranslateOptions& opts) {
  ConstraintTriple tr = translate(k, e, mode, opts);
  return fm::conj(tr.side, fm::eq(t, tr.result));
}

std::map<int, Ty> fresh_sorts(int k, const ExprPtr& e, IteMode mode, const TyCtx& ctx) {
  TyCtx local = ctx;
  std::map<int, Ty> out;
  collect_sorts(k, e, mode, local, out);
  return out;
}

TermPtr piece_value(int agent, const TermPtr& piece, int k) {
  if (k == 1) return tm::nu(agent, piece);
  std::vector<TermPtr> parts;
  for (int i = 1; i <= k; ++i) parts.push_back(tm::nu(agent, tm::proj(i, piece)));
  return tm::sum(std::move(parts));
}

FormulaPtr envy_free(const TermPtr& ret, const std::vector<int>& arities) {
  int n = static_cast<int>(arities.size());
  std::vector<FormulaPtr> parts;
  if (n == 1) return fm::conj(parts);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      parts.push_back(fm::ge(piece_value(a, tm::proj(a, ret), arities[a - 1]),
                             piece_value(a, tm::proj(b, ret), arities[b - 1])));
    }
  return fm::conj(parts);
}

FormulaPtr envy_goal(const ExprPtr& e, int n_agents, IteMode mode, const TranslateOptions& opts) {
  std::vector<int> arities = arity_of_output(e, n_agents);
  Ty ret_sort = infer(e);
  TermPtr ret = tm::ret();
  FormulaPtr c = constraint_of(0, e, ret, mode, opts);
  FormulaPtr body = fm::conj(c, fm::neg(envy_free(ret, arities)));
  std::vector<Binder> binders{{Var::ret(), ret_sort}};
  for (auto& b : y_binders(free_ys(c), fresh_sorts(0, e, mode))) binders.push_back(b);
  return fm::exists(std::move(binders), body);
}

FormulaPtr progress_formula(const ExprPtr& e, IteMode mode, const TranslateOptions& opts,
                            std::vector<Obligation>* obligations) {
  infer(e);
  Progress p(e, mode, opts, obligations);
  TyCtx ctx;
  return p.ef(0, e, fm::top(), Substitution(), ctx);
}

std::vector<Obligation> progress_obligations(const ExprPtr& e, IteMode mode, const TranslateOptions& opts) {
  std::vector<Obligation> out;
  progress_formula(e, mode, opts, &out);
  return out;
}

FormulaPtr progress_goal(const ExprPtr& e, IteMode mode, const TranslateOptions& opts) {
  return fm::neg(progress_formula(e, mode, opts, nullptr));
}

std::uint64_t count_paths(const ExprPtr& e) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto mul = [&](std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kMax / a) throw std::overflow_error("path count overflows 64 bits");
    return a * b;
  };
  if (e->kind == ExprKind::If) {
    std::uint64_t t = count_paths(e->kids[1]), f = count_paths(e->kids[2]);
    if (t > kMax - f) throw std::overflow_error("path count overflows 64 bits");
    return mul(count_paths(e->kids[0]), t + f);
  }
  std::uint64_t n = 1;
  for (const auto& kid : e->kids) n = mul(n, count_paths(kid));
  return n;
}

}  // namespace slice
