#pragma once

#include "slice/core.hpp"

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slice {

// Agent subscript of a query: a literal index, or a definition parameter.
struct AgentRef {
  int index = 0;
  std::string param;
  bool is_param() const { return !param.empty(); }
};

enum class SurfaceKind {
  Lit, Var, Prim, Let, LetTuple, Tuple, Proj, If, Cake, Left, Right, Divide, Mark, Eval, Sort, Alloc, Call
};

struct SurfaceExpr;
using SurfacePtr = std::shared_ptr<const SurfaceExpr>;

// Surface syntax: the core forms plus tuple patterns, sort_a, alloc and definition calls.
struct SurfaceExpr {
  SurfaceKind kind = SurfaceKind::Lit;
  Value lit;
  PrimOp op = PrimOp::Eq;
  std::string name;                // Var, Let, Call
  std::vector<std::string> names;  // LetTuple pattern
  AgentRef agent;                  // Mark, Eval, Sort
  int index = 0;                   // Proj
  std::vector<SurfacePtr> kids;
  SourceLoc loc;
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  std::vector<bool> agent_param;  // parallel to params
  SurfacePtr body;
  SourceLoc loc;
};

struct Program {
  int agent_count = 0;
  std::vector<Definition> defs;
  SurfacePtr main;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };
  ParseError(Kind kind, const std::string& msg, SourceLoc loc)
      : std::runtime_error(to_string(loc) + ": " + msg), kind_(kind), loc_(loc) {}
  Kind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  Kind kind_;
  SourceLoc loc_;
};

// Parses and scope-checks a protocol file:
//   agents N
//   def name(params) = expr;   (zero or more)
//   expr
Program parse(std::string_view text);
Program load_program(const std::filesystem::path& file);

// Canonical surface rendering; parse(to_string(p)) reproduces p.
std::string to_string(const Program& p);

// Inlines definitions and expands tuple patterns, sort_a and alloc into core syntax.
ExprPtr desugar(const Program& p);

// Non-blank, non-comment source lines.
int count_program_lines(std::string_view text);

}  // namespace slice
