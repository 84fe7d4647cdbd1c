#pragma once

#include "slice/core.hpp"
#include "slice/valuation.hpp"

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slice::logic {

// y: fresh (query or branch) variables, x: embedded program variables,
// ret: the output variable(s), bound: quantifier-local names such as axiom variables.
enum class VarKind { y, x, ret, bound };

struct Var {
  VarKind kind = VarKind::bound;
  int index = 0;
  std::string name;

  static Var y(int i) { return {VarKind::y, i, ""}; }
  static Var x(std::string n) { return {VarKind::x, 0, std::move(n)}; }
  static Var ret(int i = 0) { return {VarKind::ret, i, ""}; }
  static Var bound(std::string n) { return {VarKind::bound, 0, std::move(n)}; }

  auto operator<=>(const Var&) const = default;
};

std::string to_string(const Var& v);

enum class Fn { op, tuple, proj, ite, left, right, interval, nu };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Terms are immutable and freely shared, so a term is a DAG.
struct Term {
  enum class Kind { var, constant, app };
  Kind kind = Kind::constant;
  Var var;
  Value value;
  Fn fn = Fn::op;
  PrimOp op = PrimOp::Eq;  // fn == op
  int index = 0;           // proj: component, nu: agent
  std::vector<TermPtr> args;
};

namespace tm {
TermPtr var(Var v);
TermPtr y(int i);
TermPtr x(const std::string& name);
TermPtr ret(int i = 0);
TermPtr constant(Value v);
TermPtr num(const Rational& r);
TermPtr op(PrimOp o, std::vector<TermPtr> args);
TermPtr tuple(std::vector<TermPtr> elems);
TermPtr proj(int k, TermPtr t);
TermPtr ite(TermPtr c, TermPtr a, TermPtr b);
TermPtr left(TermPtr t);
TermPtr right(TermPtr t);
TermPtr interval(TermPtr lo, TermPtr hi);
TermPtr nu(int agent, TermPtr piece);
// Left-nested sum; requires at least one summand.
TermPtr sum(std::vector<TermPtr> terms);
}  // namespace tm

struct Binder {
  Var var;
  Ty sort;
};

enum class FKind { top, bottom, eq, ge, neg, conj, disj, implies, forall, exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind = FKind::top;
  TermPtr lhs, rhs;                 // eq, ge
  std::vector<FormulaPtr> parts;    // neg (1), conj/disj (any), implies (2), quantifiers (1)
  std::vector<Binder> binders;      // quantifiers
};

namespace fm {
FormulaPtr top();
FormulaPtr bottom();
FormulaPtr eq(TermPtr a, TermPtr b);
FormulaPtr ge(TermPtr a, TermPtr b);
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(std::vector<FormulaPtr> parts);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(std::vector<FormulaPtr> parts);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr forall(std::vector<Binder> binders, FormulaPtr body);
FormulaPtr exists(std::vector<Binder> binders, FormulaPtr body);
}  // namespace fm

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);

std::set<Var> free_vars(const TermPtr& t);
std::set<Var> free_vars(const FormulaPtr& f);
std::set<int> free_ys(const FormulaPtr& f);
std::set<int> free_ys(const TermPtr& t);
std::set<std::string> free_xs(const FormulaPtr& f);
std::set<std::string> free_xs(const TermPtr& t);

// Simultaneous replacement of free variables; quantifier binders shadow.
TermPtr replace(const TermPtr& t, const std::map<Var, TermPtr>& m);
FormulaPtr replace(const FormulaPtr& f, const std::map<Var, TermPtr>& m);

// Sequence of single substitutions of program variables, {t_n/x_n}...{t_1/x_1},
// stored in application order (leftmost first).
class Substitution {
 public:
  Substitution() = default;
  static Substitution single(const std::string& x, TermPtr t);

  // {t/x}S: the new step is applied before the existing ones.
  Substitution prepend(const std::string& x, TermPtr t) const;

  const std::vector<std::pair<std::string, TermPtr>>& steps() const { return steps_; }
  std::set<std::string> domain() const;
  // Largest y index occurring in any replacement term, 0 if none.
  int max_y() const;
  // Replacement terms share no y variables, and each mentions only program
  // variables that later steps eliminate.
  bool well_formed() const;

 private:
  std::vector<std::pair<std::string, TermPtr>> steps_;
};

TermPtr apply(const TermPtr& t, const Substitution& s);
FormulaPtr apply(const FormulaPtr& f, const Substitution& s);

using Assignment = std::map<Var, Value>;

class InterpretError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Proper interpretation fixed by a profile. Evaluation is lazy in ite and
// short-circuits connectives. Throws InterpretError on unassigned variables,
// ill-formed values or quantifiers.
Value interpret(const TermPtr& t, std::span<const PiecewiseValuation> profile, const Assignment& a);
bool interpret(const FormulaPtr& f, std::span<const PiecewiseValuation> profile, const Assignment& a);

// Sort of a term given sorts for its free variables. Throws std::invalid_argument.
Ty sort_of(const TermPtr& t, const std::map<Var, Ty>& sorts);

// Distinct term and formula nodes reachable from f.
std::size_t dag_size(const FormulaPtr& f);

}  // namespace slice::logic
