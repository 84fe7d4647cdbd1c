#include "slice/typecheck.hpp"

namespace slice {

const Ty* TyCtx::lookup(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

std::optional<Ty> join(const Ty& a, const Ty& b) {
  if (is_subtype(a, b)) return b;
  if (is_subtype(b, a)) return a;
  if (a.is_numeric() && b.is_numeric()) return Ty::real();
  if (a.kind() == Ty::Kind::Product && b.kind() == Ty::Kind::Product && a.elems().size() == b.elems().size()) {
    std::vector<Ty> elems;
    for (std::size_t i = 0; i < a.elems().size(); ++i) {
      auto j = join(a.elems()[i], b.elems()[i]);
      if (!j) return std::nullopt;
      elems.push_back(*j);
    }
    return Ty::product(std::move(elems));
  }
  return std::nullopt;
}

Ty literal_type(const Value& v) {
  if (v.is_boolean()) return Ty::boolean();
  if (v.is_interval()) return Ty::interval();
  if (v.is_tuple()) {
    std::vector<Ty> elems;
    for (const auto& c : v.as_tuple()) elems.push_back(literal_type(c));
    return Ty::product(std::move(elems));
  }
  const Rational& r = v.as_number();
  if (r >= 0 && r <= 1) return Ty::pos();
  if (r > 1 && is_integer(r)) return Ty::nat();
  return Ty::real();
}

namespace {

void expect(bool ok, const std::string& msg, const Expr& e) {
  if (!ok) throw TypeError(msg, e.loc);
}

Ty infer_in(const Expr& e, TyCtx& ctx);

Ty infer_prim(const Expr& e, TyCtx& ctx) {
  std::vector<Ty> args;
  for (const auto& k : e.kids) args.push_back(infer_in(*k, ctx));
  auto numeric = [&](std::size_t i) {
    expect(args[i].is_numeric(), "operator " + to_string(e.op) + " expects a number, got " + to_string(args[i]),
           e);
  };
  auto boolean = [&](std::size_t i) {
    expect(args[i].kind() == Ty::Kind::Bool,
           "operator " + to_string(e.op) + " expects a boolean, got " + to_string(args[i]), e);
  };
  switch (e.op) {
    case PrimOp::Eq:
    case PrimOp::Ne:
      expect(join(args[0], args[1]).has_value(),
             "cannot compare " + to_string(args[0]) + " with " + to_string(args[1]), e);
      return Ty::boolean();
    case PrimOp::Le:
    case PrimOp::Ge:
      numeric(0);
      numeric(1);
      return Ty::boolean();
    case PrimOp::Add:
    case PrimOp::Mul:
      numeric(0);
      numeric(1);
      if (args[0].kind() == Ty::Kind::Nat && args[1].kind() == Ty::Kind::Nat) return Ty::nat();
      return Ty::real();
    case PrimOp::Sub:
      numeric(0);
      numeric(1);
      return Ty::real();
    case PrimOp::Div: {
      numeric(0);
      numeric(1);
      const Expr& d = *e.kids[1];
      expect(d.kind == ExprKind::Lit && d.lit.is_number() && d.lit.as_number() != 0,
             "division is only allowed by a non-zero literal", e);
      return Ty::real();
    }
    case PrimOp::And:
    case PrimOp::Or:
      boolean(0);
      boolean(1);
      return Ty::boolean();
    case PrimOp::Not:
      boolean(0);
      return Ty::boolean();
  }
  throw TypeError("unknown operator", e.loc);
}

Ty infer_in(const Expr& e, TyCtx& ctx) {
  switch (e.kind) {
    case ExprKind::Lit: return literal_type(e.lit);
    case ExprKind::Var: {
      const Ty* t = ctx.lookup(e.name);
      expect(t != nullptr, "unbound variable '" + e.name + "'", e);
      return *t;
    }
    case ExprKind::Prim: return infer_prim(e, ctx);
    case ExprKind::Let: {
      Ty bound = infer_in(*e.kids[0], ctx);
      ctx.push(e.name, bound);
      Ty body = infer_in(*e.kids[1], ctx);
      ctx.pop();
      return body;
    }
    case ExprKind::Tuple: {
      std::vector<Ty> elems;
      for (const auto& k : e.kids) elems.push_back(infer_in(*k, ctx));
      return Ty::product(std::move(elems));
    }
    case ExprKind::Proj: {
      Ty t = infer_in(*e.kids[0], ctx);
      expect(t.kind() == Ty::Kind::Product, "projection from non-tuple type " + to_string(t), e);
      expect(e.index >= 1 && e.index <= static_cast<int>(t.elems().size()),
             "projection " + std::to_string(e.index) + " out of range for " + to_string(t), e);
      return t.elems()[e.index - 1];
    }
    case ExprKind::If: {
      Ty g = infer_in(*e.kids[0], ctx);
      expect(g.kind() == Ty::Kind::Bool, "guard has type " + to_string(g) + ", expected B", *e.kids[0]);
      Ty a = infer_in(*e.kids[1], ctx);
      Ty b = infer_in(*e.kids[2], ctx);
      auto j = join(a, b);
      expect(j.has_value(), "branches have incompatible types " + to_string(a) + " and " + to_string(b), e);
      return *j;
    }
    case ExprKind::Cake: return Ty::interval();
    case ExprKind::Left:
    case ExprKind::Right: {
      Ty t = infer_in(*e.kids[0], ctx);
      expect(t.kind() == Ty::Kind::Interval, "endpoint of non-interval type " + to_string(t), e);
      return Ty::pos();
    }
    case ExprKind::Divide: {
      Ty p = infer_in(*e.kids[0], ctx);
      Ty c = infer_in(*e.kids[1], ctx);
      expect(p.kind() == Ty::Kind::Interval, "divide expects an interval, got " + to_string(p), e);
      expect(c.is_numeric(), "divide expects a numeric cut, got " + to_string(c), e);
      return Ty::product({Ty::interval(), Ty::interval()});
    }
    case ExprKind::Mark: {
      Ty from = infer_in(*e.kids[0], ctx);
      Ty target = infer_in(*e.kids[1], ctx);
      expect(is_subtype(from, Ty::pos()), "mark start must have type E, got " + to_string(from), e);
      expect(target.is_numeric(), "mark target must be numeric, got " + to_string(target), e);
      return Ty::pos();
    }
    case ExprKind::Eval: {
      Ty p = infer_in(*e.kids[0], ctx);
      expect(p.kind() == Ty::Kind::Interval, "eval expects an interval, got " + to_string(p), e);
      return Ty::real();
    }
  }
  throw TypeError("unknown expression", e.loc);
}

}  // namespace

Ty infer(const ExprPtr& e, const TyCtx& ctx) {
  TyCtx local = ctx;
  return infer_in(*e, local);
}

}  // namespace slice
