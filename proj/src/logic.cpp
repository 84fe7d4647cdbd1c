#include "slice/logic.hpp"

#include "slice/typecheck.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace slice::logic {

std::string to_string(const Var& v) {
  switch (v.kind) {
    case VarKind::y: return "y" + std::to_string(v.index);
    case VarKind::x: return "^" + v.name;
    case VarKind::ret: return v.index == 0 ? "ret" : "ret" + std::to_string(v.index);
    case VarKind::bound: return v.name;
  }
  return "?";
}

namespace tm {

namespace {

TermPtr app(Fn fn, std::vector<TermPtr> args, int index = 0, PrimOp o = PrimOp::Eq) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::app;
  t->fn = fn;
  t->op = o;
  t->index = index;
  t->args = std::move(args);
  for (const auto& a : t->args)
    if (!a) throw std::invalid_argument("null term argument");
  return t;
}

}  // namespace

TermPtr var(Var v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::var;
  t->var = std::move(v);
  return t;
}

TermPtr y(int i) { return var(Var::y(i)); }
TermPtr x(const std::string& name) { return var(Var::x(name)); }
TermPtr ret(int i) { return var(Var::ret(i)); }

TermPtr constant(Value v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::constant;
  t->value = std::move(v);
  return t;
}

TermPtr num(const Rational& r) { return constant(Value::number(r)); }

TermPtr op(PrimOp o, std::vector<TermPtr> args) {
  if (static_cast<int>(args.size()) != arity(o)) throw std::invalid_argument("operator arity mismatch");
  return app(Fn::op, std::move(args), 0, o);
}

TermPtr tuple(std::vector<TermPtr> elems) {
  if (elems.size() < 2) throw std::invalid_argument("tuples need at least two components");
  return app(Fn::tuple, std::move(elems));
}

TermPtr proj(int k, TermPtr t) { return app(Fn::proj, {std::move(t)}, k); }
TermPtr ite(TermPtr c, TermPtr a, TermPtr b) { return app(Fn::ite, {std::move(c), std::move(a), std::move(b)}); }
TermPtr left(TermPtr t) { return app(Fn::left, {std::move(t)}); }
TermPtr right(TermPtr t) { return app(Fn::right, {std::move(t)}); }
TermPtr interval(TermPtr lo, TermPtr hi) { return app(Fn::interval, {std::move(lo), std::move(hi)}); }
TermPtr nu(int agent, TermPtr piece) { return app(Fn::nu, {std::move(piece)}, agent); }

TermPtr sum(std::vector<TermPtr> terms) {
  if (terms.empty()) throw std::invalid_argument("empty sum");
  TermPtr acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = op(PrimOp::Add, {acc, terms[i]});
  return acc;
}

}  // namespace tm

namespace fm {

namespace {

std::shared_ptr<Formula> make(FKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

FormulaPtr atom(FKind k, TermPtr a, TermPtr b) {
  if (!a || !b) throw std::invalid_argument("null term in atom");
  auto f = make(k);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr nary(FKind k, std::vector<FormulaPtr> parts) {
  for (const auto& p : parts)
    if (!p) throw std::invalid_argument("null subformula");
  auto f = make(k);
  f->parts = std::move(parts);
  return f;
}

}  // namespace

FormulaPtr top() {
  static const FormulaPtr t = make(FKind::top);
  return t;
}

FormulaPtr bottom() {
  static const FormulaPtr f = make(FKind::bottom);
  return f;
}

FormulaPtr eq(TermPtr a, TermPtr b) { return atom(FKind::eq, std::move(a), std::move(b)); }
FormulaPtr ge(TermPtr a, TermPtr b) { return atom(FKind::ge, std::move(a), std::move(b)); }
FormulaPtr neg(FormulaPtr f) { return nary(FKind::neg, {std::move(f)}); }
FormulaPtr conj(std::vector<FormulaPtr> parts) { return nary(FKind::conj, std::move(parts)); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return conj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }
FormulaPtr disj(std::vector<FormulaPtr> parts) { return nary(FKind::disj, std::move(parts)); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return disj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return nary(FKind::implies, {std::move(a), std::move(b)}); }

FormulaPtr forall(std::vector<Binder> binders, FormulaPtr body) {
  auto f = std::const_pointer_cast<Formula>(nary(FKind::forall, {std::move(body)}));
  f->binders = std::move(binders);
  return f;
}

FormulaPtr exists(std::vector<Binder> binders, FormulaPtr body) {
  auto f = std::const_pointer_cast<Formula>(nary(FKind::exists, {std::move(body)}));
  f->binders = std::move(binders);
  return f;
}

}  // namespace fm

namespace {

void print(const Term& t, std::ostream& os) {
  switch (t.kind) {
    case Term::Kind::var: os << to_string(t.var); return;
    case Term::Kind::constant: os << slice::to_string(t.value); return;
    case Term::Kind::app: break;
  }
  auto list = [&](const char* open, const char* close) {
    os << open;
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      print(*t.args[i], os);
    }
    os << close;
  };
  switch (t.fn) {
    case Fn::op:
      if (t.op == PrimOp::Not) {
        os << "not(";
        print(*t.args[0], os);
        os << ")";
      } else {
        os << "(";
        print(*t.args[0], os);
        os << " " << slice::to_string(t.op) << " ";
        print(*t.args[1], os);
        os << ")";
      }
      return;
    case Fn::tuple: list("(", ")"); return;
    case Fn::proj: os << "pi_" << t.index; list("(", ")"); return;
    case Fn::ite: os << "ite"; list("(", ")"); return;
    case Fn::left: os << "l"; list("(", ")"); return;
    case Fn::right: os << "r"; list("(", ")"); return;
    case Fn::interval: list("[", "]"); return;
    case Fn::nu: os << "nu_" << t.index; list("(", ")"); return;
  }
}

void print(const Formula& f, std::ostream& os) {
  auto joined = [&](const char* sep) {
    os << "(";
    for (std::size_t i = 0; i < f.parts.size(); ++i) {
      if (i) os << sep;
      print(*f.parts[i], os);
    }
    os << ")";
  };
  switch (f.kind) {
    case FKind::top: os << "true"; return;
    case FKind::bottom: os << "false"; return;
    case FKind::eq:
      print(*f.lhs, os);
      os << " = ";
      print(*f.rhs, os);
      return;
    case FKind::ge:
      print(*f.lhs, os);
      os << " >= ";
      print(*f.rhs, os);
      return;
    case FKind::neg:
      os << "not ";
      joined("");
      return;
    case FKind::conj:
      if (f.parts.empty()) os << "true";
      else joined(" and ");
      return;
    case FKind::disj:
      if (f.parts.empty()) os << "false";
      else joined(" or ");
      return;
    case FKind::implies: joined(" => "); return;
    case FKind::forall:
    case FKind::exists:
      os << (f.kind == FKind::forall ? "forall " : "exists ");
      for (std::size_t i = 0; i < f.binders.size(); ++i)
        os << (i ? ", " : "") << to_string(f.binders[i].var) << ":" << slice::to_string(f.binders[i].sort);
      os << ". ";
      print(*f.parts[0], os);
      return;
  }
}

class FreeVars {
 public:
  const std::set<Var>& of(const Term& t) {
    if (auto it = terms_.find(&t); it != terms_.end()) return it->second;
    std::set<Var> out;
    if (t.kind == Term::Kind::var) out.insert(t.var);
    for (const auto& a : t.args) {
      const auto& s = of(*a);
      out.insert(s.begin(), s.end());
    }
    return terms_.emplace(&t, std::move(out)).first->second;
  }

  const std::set<Var>& of(const Formula& f) {
    if (auto it = formulas_.find(&f); it != formulas_.end()) return it->second;
    std::set<Var> out;
    if (f.lhs) {
      const auto& s = of(*f.lhs);
      out.insert(s.begin(), s.end());
    }
    if (f.rhs) {
      const auto& s = of(*f.rhs);
      out.insert(s.begin(), s.end());
    }
    for (const auto& p : f.parts) {
      const auto& s = of(*p);
      out.insert(s.begin(), s.end());
    }
    for (const auto& b : f.binders) out.erase(b.var);
    return formulas_.emplace(&f, std::move(out)).first->second;
  }

 private:
  std::unordered_map<const Term*, std::set<Var>> terms_;
  std::unordered_map<const Formula*, std::set<Var>> formulas_;
};

class Replacer {
 public:
  explicit Replacer(const std::map<Var, TermPtr>& m) : m_(m) {}

  TermPtr term(const TermPtr& t) {
    if (auto it = terms_.find(t.get()); it != terms_.end()) return it->second;
    TermPtr out = t;
    if (t->kind == Term::Kind::var) {
      if (auto it = m_.find(t->var); it != m_.end()) out = it->second;
    } else if (t->kind == Term::Kind::app) {
      std::vector<TermPtr> args;
      bool changed = false;
      for (const auto& a : t->args) {
        args.push_back(term(a));
        changed = changed || args.back() != a;
      }
      if (changed) {
        auto n = std::make_shared<Term>(*t);
        n->args = std::move(args);
        out = n;
      }
    }
    terms_.emplace(t.get(), out);
    return out;
  }

  FormulaPtr formula(const FormulaPtr& f) {
    if (auto it = formulas_.find(f.get()); it != formulas_.end()) return it->second;
    FormulaPtr out = f;
    if (f->kind == FKind::forall || f->kind == FKind::exists) {
      std::map<Var, TermPtr> inner = m_;
      for (const auto& b : f->binders) inner.erase(b.var);
      FormulaPtr body = inner.size() == m_.size() ? formula(f->parts[0]) : Replacer(inner).formula(f->parts[0]);
      if (body != f->parts[0]) {
        auto n = std::make_shared<Formula>(*f);
        n->parts = {body};
        out = n;
      }
    } else {
      bool changed = false;
      auto n = std::make_shared<Formula>(*f);
      if (f->lhs) {
        n->lhs = term(f->lhs);
        n->rhs = term(f->rhs);
        changed = n->lhs != f->lhs || n->rhs != f->rhs;
      }
      for (auto& p : n->parts) {
        FormulaPtr q = formula(p);
        changed = changed || q != p;
        p = q;
      }
      if (changed) out = n;
    }
    formulas_.emplace(f.get(), out);
    return out;
  }

 private:
  const std::map<Var, TermPtr>& m_;
  std::unordered_map<const Term*, TermPtr> terms_;
  std::unordered_map<const Formula*, FormulaPtr> formulas_;
};

std::set<int> ys_of(const std::set<Var>& vs) {
  std::set<int> out;
  for (const auto& v : vs)
    if (v.kind == VarKind::y) out.insert(v.index);
  return out;
}

std::set<std::string> xs_of(const std::set<Var>& vs) {
  std::set<std::string> out;
  for (const auto& v : vs)
    if (v.kind == VarKind::x) out.insert(v.name);
  return out;
}

class Interpreter {
 public:
  Interpreter(std::span<const PiecewiseValuation> profile, const Assignment& a) : profile_(profile), a_(a) {}

  Value term(const Term& t) {
    if (auto it = terms_.find(&t); it != terms_.end()) return it->second;
    Value v = compute(t);
    terms_.emplace(&t, v);
    return v;
  }

  bool formula(const Formula& f) {
    if (auto it = formulas_.find(&f); it != formulas_.end()) return it->second;
    bool v = compute(f);
    formulas_.emplace(&f, v);
    return v;
  }

 private:
  Value compute(const Term& t) {
    try {
      switch (t.kind) {
        case Term::Kind::var: {
          auto it = a_.find(t.var);
          if (it == a_.end()) throw InterpretError("unassigned variable " + to_string(t.var));
          return it->second;
        }
        case Term::Kind::constant: return t.value;
        case Term::Kind::app: break;
      }
      switch (t.fn) {
        case Fn::op: {
          std::vector<Value> args;
          for (const auto& a : t.args) args.push_back(term(*a));
          return apply_prim(t.op, args);
        }
        case Fn::tuple: {
          Value::Tuple elems;
          for (const auto& a : t.args) elems.push_back(term(*a));
          return Value::tuple(std::move(elems));
        }
        case Fn::proj: {
          Value v = term(*t.args[0]);
          const auto& elems = v.as_tuple();
          if (t.index < 1 || t.index > static_cast<int>(elems.size()))
            throw InterpretError("projection out of range");
          return elems[t.index - 1];
        }
        case Fn::ite: return term(*t.args[0]).as_boolean() ? term(*t.args[1]) : term(*t.args[2]);
        case Fn::left: return Value::number(term(*t.args[0]).as_interval().lo);
        case Fn::right: return Value::number(term(*t.args[0]).as_interval().hi);
        case Fn::interval: return Value::interval(term(*t.args[0]).as_number(), term(*t.args[1]).as_number());
        case Fn::nu: {
          if (t.index < 1 || t.index > static_cast<int>(profile_.size()))
            throw InterpretError("no valuation for agent " + std::to_string(t.index));
          return Value::number(profile_[t.index - 1].value_of(term(*t.args[0]).as_interval()));
        }
      }
    } catch (const std::domain_error& e) {
      throw InterpretError(e.what());
    } catch (const std::invalid_argument& e) {
      throw InterpretError(e.what());
    }
    throw InterpretError("unknown term");
  }

  bool compute(const Formula& f) {
    try {
      switch (f.kind) {
        case FKind::top: return true;
        case FKind::bottom: return false;
        case FKind::eq: return term(*f.lhs) == term(*f.rhs);
        case FKind::ge: return term(*f.lhs).as_number() >= term(*f.rhs).as_number();
        case FKind::neg: return !formula(*f.parts[0]);
        case FKind::conj:
          for (const auto& p : f.parts)
            if (!formula(*p)) return false;
          return true;
        case FKind::disj:
          for (const auto& p : f.parts)
            if (formula(*p)) return true;
          return false;
        case FKind::implies: return !formula(*f.parts[0]) || formula(*f.parts[1]);
        case FKind::forall:
        case FKind::exists: throw InterpretError("cannot interpret a quantified formula");
      }
    } catch (const std::domain_error& e) {
      throw InterpretError(e.what());
    }
    throw InterpretError("unknown formula");
  }

  std::span<const PiecewiseValuation> profile_;
  const Assignment& a_;
  std::unordered_map<const Term*, Value> terms_;
  std::unordered_map<const Formula*, bool> formulas_;
};

}  // namespace

std::string to_string(const TermPtr& t) {
  std::ostringstream os;
  print(*t, os);
  return os.str();
}

std::string to_string(const FormulaPtr& f) {
  std::ostringstream os;
  print(*f, os);
  return os.str();
}

std::set<Var> free_vars(const TermPtr& t) { return FreeVars().of(*t); }
std::set<Var> free_vars(const FormulaPtr& f) { return FreeVars().of(*f); }
std::set<int> free_ys(const FormulaPtr& f) { return ys_of(free_vars(f)); }
std::set<int> free_ys(const TermPtr& t) { return ys_of(free_vars(t)); }
std::set<std::string> free_xs(const FormulaPtr& f) { return xs_of(free_vars(f)); }
std::set<std::string> free_xs(const TermPtr& t) { return xs_of(free_vars(t)); }

TermPtr replace(const TermPtr& t, const std::map<Var, TermPtr>& m) {
  if (m.empty()) return t;
  return Replacer(m).term(t);
}

FormulaPtr replace(const FormulaPtr& f, const std::map<Var, TermPtr>& m) {
  if (m.empty()) return f;
  return Replacer(m).formula(f);
}

Substitution Substitution::single(const std::string& x, TermPtr t) { return Substitution().prepend(x, std::move(t)); }

Substitution Substitution::prepend(const std::string& x, TermPtr t) const {
  Substitution s;
  s.steps_.reserve(steps_.size() + 1);
  s.steps_.emplace_back(x, std::move(t));
  s.steps_.insert(s.steps_.end(), steps_.begin(), steps_.end());
  return s;
}

std::set<std::string> Substitution::domain() const {
  std::set<std::string> out;
  for (const auto& [x, t] : steps_) out.insert(x);
  return out;
}

int Substitution::max_y() const {
  int m = 0;
  for (const auto& [x, t] : steps_)
    for (int i : free_ys(t)) m = std::max(m, i);
  return m;
}

bool Substitution::well_formed() const {
  std::set<int> seen_ys;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    for (int y : free_ys(steps_[i].second))
      if (!seen_ys.insert(y).second) return false;
    std::set<std::string> later;
    for (std::size_t j = i + 1; j < steps_.size(); ++j) later.insert(steps_[j].first);
    for (const auto& x : free_xs(steps_[i].second))
      if (!later.contains(x)) return false;
  }
  return true;
}

TermPtr apply(const TermPtr& t, const Substitution& s) {
  TermPtr out = t;
  for (const auto& [x, u] : s.steps()) out = replace(out, {{Var::x(x), u}});
  return out;
}

FormulaPtr apply(const FormulaPtr& f, const Substitution& s) {
  FormulaPtr out = f;
  for (const auto& [x, u] : s.steps()) out = replace(out, {{Var::x(x), u}});
  return out;
}

Value interpret(const TermPtr& t, std::span<const PiecewiseValuation> profile, const Assignment& a) {
  return Interpreter(profile, a).term(*t);
}

bool interpret(const FormulaPtr& f, std::span<const PiecewiseValuation> profile, const Assignment& a) {
  return Interpreter(profile, a).formula(*f);
}

Ty sort_of(const TermPtr& t, const std::map<Var, Ty>& sorts) {
  switch (t->kind) {
    case Term::Kind::var: {
      auto it = sorts.find(t->var);
      if (it == sorts.end()) throw std::invalid_argument("no sort for " + to_string(t->var));
      return it->second;
    }
    case Term::Kind::constant: return literal_type(t->value);
    case Term::Kind::app: break;
  }
  auto arg = [&](std::size_t i) { return sort_of(t->args[i], sorts); };
  switch (t->fn) {
    case Fn::op:
      switch (t->op) {
        case PrimOp::Eq:
        case PrimOp::Ne:
        case PrimOp::Le:
        case PrimOp::Ge:
        case PrimOp::And:
        case PrimOp::Or:
        case PrimOp::Not: return Ty::boolean();
        default: return Ty::real();
      }
    case Fn::tuple: {
      std::vector<Ty> elems;
      for (std::size_t i = 0; i < t->args.size(); ++i) elems.push_back(arg(i));
      return Ty::product(std::move(elems));
    }
    case Fn::proj: {
      Ty p = arg(0);
      if (p.kind() != Ty::Kind::Product || t->index < 1 || t->index > static_cast<int>(p.elems().size()))
        throw std::invalid_argument("ill-sorted projection " + to_string(t));
      return p.elems()[t->index - 1];
    }
    case Fn::ite: {
      Ty a = arg(1), b = arg(2);
      if (a == b) return a;
      if (a.is_numeric() && b.is_numeric()) return Ty::real();
      if (is_subtype(a, b)) return b;
      if (is_subtype(b, a)) return a;
      throw std::invalid_argument("ill-sorted ite " + to_string(t));
    }
    case Fn::left:
    case Fn::right: return Ty::pos();
    case Fn::interval: return Ty::interval();
    case Fn::nu: return Ty::real();
  }
  throw std::invalid_argument("unknown term");
}

std::size_t dag_size(const FormulaPtr& f) {
  std::unordered_set<const void*> seen;
  std::vector<const Term*> terms;
  std::vector<const Formula*> formulas{f.get()};
  while (!formulas.empty()) {
    const Formula* g = formulas.back();
    formulas.pop_back();
    if (!seen.insert(g).second) continue;
    if (g->lhs) terms.push_back(g->lhs.get());
    if (g->rhs) terms.push_back(g->rhs.get());
    for (const auto& p : g->parts) formulas.push_back(p.get());
  }
  while (!terms.empty()) {
    const Term* t = terms.back();
    terms.pop_back();
    if (!seen.insert(t).second) continue;
    for (const auto& a : t->args) terms.push_back(a.get());
  }
  return seen.size();
}

}  // namespace slice::logic
