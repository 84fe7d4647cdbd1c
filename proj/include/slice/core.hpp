#pragma once

#include "slice/rational.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace slice {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

std::string to_string(SourceLoc loc);

// Agents are numbered from 1.
struct AgentId {
  int index = 1;
  auto operator<=>(const AgentId&) const = default;
};

struct Interval {
  Rational lo;
  Rational hi;
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

class Value {
 public:
  using Tuple = std::vector<Value>;

  Value() : data_(false) {}
  static Value number(Rational r);
  static Value boolean(bool b);
  // Throws std::invalid_argument unless 0 <= lo <= hi <= 1.
  static Value interval(Rational lo, Rational hi);
  static Value interval(const Interval& i) { return interval(i.lo, i.hi); }
  static Value tuple(Tuple elems);

  bool is_number() const { return data_.index() == 0; }
  bool is_boolean() const { return data_.index() == 1; }
  bool is_interval() const { return data_.index() == 2; }
  bool is_tuple() const { return data_.index() == 3; }

  const Rational& as_number() const;
  bool as_boolean() const;
  const Interval& as_interval() const;
  const Tuple& as_tuple() const;

  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  std::variant<Rational, bool, Interval, Tuple> data_;
};

std::string to_string(const Value& v);

// Slice types. Pos is the unit interval of reals; Nat and Pos are subtypes of Real.
class Ty {
 public:
  enum class Kind { Bool, Nat, Real, Pos, Interval, Product };

  Ty() = default;
  explicit Ty(Kind k) : kind_(k) {}
  static Ty boolean() { return Ty(Kind::Bool); }
  static Ty nat() { return Ty(Kind::Nat); }
  static Ty real() { return Ty(Kind::Real); }
  static Ty pos() { return Ty(Kind::Pos); }
  static Ty interval() { return Ty(Kind::Interval); }
  static Ty product(std::vector<Ty> elems);

  Kind kind() const { return kind_; }
  const std::vector<Ty>& elems() const { return elems_; }
  bool is_numeric() const { return kind_ == Kind::Nat || kind_ == Kind::Real || kind_ == Kind::Pos; }

  bool operator==(const Ty& o) const { return kind_ == o.kind_ && elems_ == o.elems_; }

 private:
  Kind kind_ = Kind::Real;
  std::vector<Ty> elems_;
};

std::string to_string(const Ty& t);
bool is_subtype(const Ty& sub, const Ty& super);

enum class PrimOp { Eq, Ne, Le, Ge, Add, Sub, Mul, Div, And, Or, Not };

int arity(PrimOp op);
std::string to_string(PrimOp op);
// Throws std::domain_error on ill-sorted operands or division by zero.
Value apply_prim(PrimOp op, std::span<const Value> args);

enum class ExprKind { Lit, Var, Prim, Let, Tuple, Proj, If, Cake, Left, Right, Divide, Mark, Eval };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Core syntax tree. Children live in `kids`; other fields are used per kind:
// Lit -> lit, Var/Let -> name, Prim -> op, Proj -> index, Mark/Eval -> agent.
struct Expr {
  ExprKind kind = ExprKind::Lit;
  Value lit;
  std::string name;
  PrimOp op = PrimOp::Eq;
  int index = 0;
  AgentId agent;
  std::vector<ExprPtr> kids;
  SourceLoc loc;
};

namespace ex {
ExprPtr lit(Value v, SourceLoc loc = {});
ExprPtr num(const Rational& r, SourceLoc loc = {});
ExprPtr boolean(bool b, SourceLoc loc = {});
ExprPtr var(std::string name, SourceLoc loc = {});
ExprPtr prim(PrimOp op, std::vector<ExprPtr> args, SourceLoc loc = {});
ExprPtr let(std::string name, ExprPtr bound, ExprPtr body, SourceLoc loc = {});
ExprPtr tuple(std::vector<ExprPtr> elems, SourceLoc loc = {});
ExprPtr proj(int k, ExprPtr e, SourceLoc loc = {});
ExprPtr cond(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch, SourceLoc loc = {});
ExprPtr cake(SourceLoc loc = {});
ExprPtr left(ExprPtr e, SourceLoc loc = {});
ExprPtr right(ExprPtr e, SourceLoc loc = {});
ExprPtr divide(ExprPtr piece, ExprPtr cut, SourceLoc loc = {});
ExprPtr mark(int agent, ExprPtr from, ExprPtr target, SourceLoc loc = {});
ExprPtr eval(int agent, ExprPtr piece, SourceLoc loc = {});
}  // namespace ex

std::set<std::string> fv(const ExprPtr& e);

// How if-then-else is translated; also fixes the numbering of fresh variables.
enum class IteMode { core, impl };

// Number of fresh variables the translation of `e` introduces.
int count_fresh(const ExprPtr& e, IteMode mode = IteMode::core);

// Piece arity k_a for each agent, from the output type of a closed protocol.
// Throws std::invalid_argument when the output is not an allocation of n pieces.
std::vector<int> arity_of_output(const ExprPtr& e, int n_agents);

// Core syntax rendered in the surface language.
std::string to_string(const ExprPtr& e);

}  // namespace slice
