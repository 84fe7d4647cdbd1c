#include "slice/core.hpp"

#include "slice/typecheck.hpp"

#include <sstream>

namespace slice {

std::string to_string(SourceLoc loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

Value Value::number(Rational r) {
  Value v;
  v.data_ = std::move(r);
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.data_ = b;
  return v;
}

Value Value::interval(Rational lo, Rational hi) {
  if (lo < 0 || hi > 1 || lo > hi)
    throw std::invalid_argument("ill-formed interval [" + to_string(lo) + ", " + to_string(hi) + "]");
  Value v;
  v.data_ = Interval{std::move(lo), std::move(hi)};
  return v;
}

Value Value::tuple(Tuple elems) {
  Value v;
  v.data_ = std::move(elems);
  return v;
}

const Rational& Value::as_number() const {
  if (!is_number()) throw std::domain_error("expected a number, got " + to_string(*this));
  return std::get<Rational>(data_);
}

bool Value::as_boolean() const {
  if (!is_boolean()) throw std::domain_error("expected a boolean, got " + to_string(*this));
  return std::get<bool>(data_);
}

const Interval& Value::as_interval() const {
  if (!is_interval()) throw std::domain_error("expected an interval, got " + to_string(*this));
  return std::get<Interval>(data_);
}

const Value::Tuple& Value::as_tuple() const {
  if (!is_tuple()) throw std::domain_error("expected a tuple, got " + to_string(*this));
  return std::get<Tuple>(data_);
}

std::string to_string(const Value& v) {
  if (v.is_number()) return to_string(v.as_number());
  if (v.is_boolean()) return v.as_boolean() ? "true" : "false";
  if (v.is_interval()) {
    const auto& i = v.as_interval();
    return "[" + to_string(i.lo) + ", " + to_string(i.hi) + "]";
  }
  std::string out = "(";
  const auto& t = v.as_tuple();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += to_string(t[i]);
  }
  return out + ")";
}

Ty Ty::product(std::vector<Ty> elems) {
  if (elems.size() < 2) throw std::invalid_argument("product types need at least two components");
  Ty t(Kind::Product);
  t.elems_ = std::move(elems);
  return t;
}

std::string to_string(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Bool: return "B";
    case Ty::Kind::Nat: return "N";
    case Ty::Kind::Real: return "R";
    case Ty::Kind::Pos: return "E";
    case Ty::Kind::Interval: return "I";
    case Ty::Kind::Product: {
      std::string out = "(";
      for (std::size_t i = 0; i < t.elems().size(); ++i) {
        if (i) out += " * ";
        out += to_string(t.elems()[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

bool is_subtype(const Ty& sub, const Ty& super) {
  if (sub == super) return true;
  if (super.kind() == Ty::Kind::Real) return sub.kind() == Ty::Kind::Nat || sub.kind() == Ty::Kind::Pos;
  if (sub.kind() == Ty::Kind::Product && super.kind() == Ty::Kind::Product) {
    if (sub.elems().size() != super.elems().size()) return false;
    for (std::size_t i = 0; i < sub.elems().size(); ++i)
      if (!is_subtype(sub.elems()[i], super.elems()[i])) return false;
    return true;
  }
  return false;
}

int arity(PrimOp op) { return op == PrimOp::Not ? 1 : 2; }

std::string to_string(PrimOp op) {
  switch (op) {
    case PrimOp::Eq: return "=";
    case PrimOp::Ne: return "!=";
    case PrimOp::Le: return "<=";
    case PrimOp::Ge: return ">=";
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
    case PrimOp::And: return "and";
    case PrimOp::Or: return "or";
    case PrimOp::Not: return "not";
  }
  return "?";
}

Value apply_prim(PrimOp op, std::span<const Value> args) {
  if (static_cast<int>(args.size()) != arity(op))
    throw std::domain_error("operator " + to_string(op) + " applied to wrong number of operands");
  switch (op) {
    case PrimOp::Eq: return Value::boolean(args[0] == args[1]);
    case PrimOp::Ne: return Value::boolean(!(args[0] == args[1]));
    case PrimOp::Le: return Value::boolean(args[0].as_number() <= args[1].as_number());
    case PrimOp::Ge: return Value::boolean(args[0].as_number() >= args[1].as_number());
    case PrimOp::Add: return Value::number(args[0].as_number() + args[1].as_number());
    case PrimOp::Sub: return Value::number(args[0].as_number() - args[1].as_number());
    case PrimOp::Mul: return Value::number(args[0].as_number() * args[1].as_number());
    case PrimOp::Div:
      if (args[1].as_number() == 0) throw std::domain_error("division by zero");
      return Value::number(args[0].as_number() / args[1].as_number());
    case PrimOp::And: return Value::boolean(args[0].as_boolean() && args[1].as_boolean());
    case PrimOp::Or: return Value::boolean(args[0].as_boolean() || args[1].as_boolean());
    case PrimOp::Not: return Value::boolean(!args[0].as_boolean());
  }
  throw std::domain_error("unknown operator");
}

namespace ex {

namespace {

ExprPtr node(ExprKind kind, std::vector<ExprPtr> kids, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->kids = std::move(kids);
  e->loc = loc;
  for (const auto& k : e->kids)
    if (!k) throw std::invalid_argument("null subexpression");
  return e;
}

}  // namespace

ExprPtr lit(Value v, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Lit;
  e->lit = std::move(v);
  e->loc = loc;
  return e;
}

ExprPtr num(const Rational& r, SourceLoc loc) { return lit(Value::number(r), loc); }

ExprPtr boolean(bool b, SourceLoc loc) { return lit(Value::boolean(b), loc); }

ExprPtr var(std::string name, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprPtr prim(PrimOp op, std::vector<ExprPtr> args, SourceLoc loc) {
  if (static_cast<int>(args.size()) != arity(op))
    throw std::invalid_argument("operator " + to_string(op) + " expects " + std::to_string(arity(op)) +
                                " operands");
  auto e = std::const_pointer_cast<Expr>(node(ExprKind::Prim, std::move(args), loc));
  e->op = op;
  return e;
}

ExprPtr let(std::string name, ExprPtr bound, ExprPtr body, SourceLoc loc) {
  auto e = std::const_pointer_cast<Expr>(node(ExprKind::Let, {std::move(bound), std::move(body)}, loc));
  e->name = std::move(name);
  return e;
}

ExprPtr tuple(std::vector<ExprPtr> elems, SourceLoc loc) {
  if (elems.size() < 2) throw std::invalid_argument("tuples need at least two components");
  return node(ExprKind::Tuple, std::move(elems), loc);
}

ExprPtr proj(int k, ExprPtr e, SourceLoc loc) {
  if (k < 1) throw std::invalid_argument("projection index must be positive");
  auto p = std::const_pointer_cast<Expr>(node(ExprKind::Proj, {std::move(e)}, loc));
  p->index = k;
  return p;
}

ExprPtr cond(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch, SourceLoc loc) {
  return node(ExprKind::If, {std::move(guard), std::move(then_branch), std::move(else_branch)}, loc);
}

ExprPtr cake(SourceLoc loc) { return node(ExprKind::Cake, {}, loc); }

ExprPtr left(ExprPtr e, SourceLoc loc) { return node(ExprKind::Left, {std::move(e)}, loc); }

ExprPtr right(ExprPtr e, SourceLoc loc) { return node(ExprKind::Right, {std::move(e)}, loc); }

ExprPtr divide(ExprPtr piece, ExprPtr cut, SourceLoc loc) {
  return node(ExprKind::Divide, {std::move(piece), std::move(cut)}, loc);
}

ExprPtr mark(int agent, ExprPtr from, ExprPtr target, SourceLoc loc) {
  if (agent < 1) throw std::invalid_argument("agent index must be positive");
  auto e = std::const_pointer_cast<Expr>(node(ExprKind::Mark, {std::move(from), std::move(target)}, loc));
  e->agent = AgentId{agent};
  return e;
}

ExprPtr eval(int agent, ExprPtr piece, SourceLoc loc) {
  if (agent < 1) throw std::invalid_argument("agent index must be positive");
  auto e = std::const_pointer_cast<Expr>(node(ExprKind::Eval, {std::move(piece)}, loc));
  e->agent = AgentId{agent};
  return e;
}

}  // namespace ex

namespace {

void collect_fv(const Expr& e, std::multiset<std::string>& shadow, std::set<std::string>& out) {
  switch (e.kind) {
    case ExprKind::Var:
      if (!shadow.contains(e.name)) out.insert(e.name);
      return;
    case ExprKind::Let:
      collect_fv(*e.kids[0], shadow, out);
      shadow.insert(e.name);
      collect_fv(*e.kids[1], shadow, out);
      shadow.erase(shadow.find(e.name));
      return;
    default:
      for (const auto& k : e.kids) collect_fv(*k, shadow, out);
  }
}

}  // namespace

std::set<std::string> fv(const ExprPtr& e) {
  std::set<std::string> out;
  std::multiset<std::string> shadow;
  collect_fv(*e, shadow, out);
  return out;
}

int count_fresh(const ExprPtr& e, IteMode mode) {
  int n = 0;
  if (e->kind == ExprKind::Mark) n = 1;
  if (e->kind == ExprKind::If && mode == IteMode::impl) n = 1;
  for (const auto& k : e->kids) n += count_fresh(k, mode);
  return n;
}

std::vector<int> arity_of_output(const ExprPtr& e, int n_agents) {
  if (n_agents < 1) throw std::invalid_argument("agent count must be positive");
  Ty t = infer(e);
  auto piece_arity = [](const Ty& p) -> int {
    if (p.kind() == Ty::Kind::Interval) return 1;
    if (p.kind() == Ty::Kind::Product) {
      for (const auto& c : p.elems())
        if (c.kind() != Ty::Kind::Interval) return 0;
      return static_cast<int>(p.elems().size());
    }
    return 0;
  };
  std::vector<int> out;
  if (n_agents == 1) {
    out.push_back(piece_arity(t));
  } else {
    if (t.kind() != Ty::Kind::Product || static_cast<int>(t.elems().size()) != n_agents)
      throw std::invalid_argument("output type " + to_string(t) + " is not an allocation for " +
                                  std::to_string(n_agents) + " agents");
    for (const auto& p : t.elems()) out.push_back(piece_arity(p));
  }
  for (int k : out)
    if (k == 0) throw std::invalid_argument("output type " + to_string(t) + " is not an allocation");
  return out;
}

namespace {

// Precedence levels shared with the surface printer: higher binds tighter.
int level(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Let:
    case ExprKind::If: return 0;
    case ExprKind::Prim:
      switch (e.op) {
        case PrimOp::Or: return 1;
        case PrimOp::And: return 2;
        case PrimOp::Not: return 3;
        case PrimOp::Eq:
        case PrimOp::Ne:
        case PrimOp::Le:
        case PrimOp::Ge: return 4;
        case PrimOp::Add:
        case PrimOp::Sub: return 5;
        case PrimOp::Mul:
        case PrimOp::Div: return 6;
      }
      return 0;
    case ExprKind::Left:
    case ExprKind::Right: return 7;
    case ExprKind::Lit:
      if (e.lit.is_number() && !is_integer(e.lit.as_number())) return 6;
      return 8;
    default: return 8;
  }
}

void print(const Expr& e, int min_level, std::ostream& os);

void print_args(const std::vector<ExprPtr>& kids, std::ostream& os) {
  os << "(";
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) os << ", ";
    print(*kids[i], 0, os);
  }
  os << ")";
}

void print(const Expr& e, int min_level, std::ostream& os) {
  int lv = level(e);
  bool paren = lv < min_level;
  if (paren) os << "(";
  switch (e.kind) {
    case ExprKind::Lit: os << to_string(e.lit); break;
    case ExprKind::Var: os << e.name; break;
    case ExprKind::Prim:
      if (e.op == PrimOp::Not) {
        os << "not ";
        print(*e.kids[0], 3, os);
      } else {
        print(*e.kids[0], lv == 4 ? 5 : lv, os);
        os << " " << to_string(e.op) << " ";
        print(*e.kids[1], lv + 1, os);
      }
      break;
    case ExprKind::Let:
      os << "let " << e.name << " = ";
      print(*e.kids[0], 0, os);
      os << " in ";
      print(*e.kids[1], 0, os);
      break;
    case ExprKind::Tuple: print_args(e.kids, os); break;
    case ExprKind::Proj:
      os << "piece(";
      print(*e.kids[0], 0, os);
      os << ", " << e.index << ")";
      break;
    case ExprKind::If:
      os << "if ";
      print(*e.kids[0], 0, os);
      os << " then ";
      print(*e.kids[1], 0, os);
      os << " else ";
      print(*e.kids[2], 0, os);
      break;
    case ExprKind::Cake: os << "cake"; break;
    case ExprKind::Left:
    case ExprKind::Right:
      os << (e.kind == ExprKind::Left ? "left " : "right ");
      print(*e.kids[0], 7, os);
      break;
    case ExprKind::Divide:
      os << "divide";
      print_args(e.kids, os);
      break;
    case ExprKind::Mark:
      os << "mark_" << e.agent.index;
      print_args(e.kids, os);
      break;
    case ExprKind::Eval:
      os << "eval_" << e.agent.index;
      print_args(e.kids, os);
      break;
  }
  if (paren) os << ")";
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print(*e, 0, os);
  return os.str();
}

}  // namespace slice
