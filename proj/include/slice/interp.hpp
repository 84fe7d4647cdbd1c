#pragma once

#include "slice/core.hpp"
#include "slice/parser.hpp"
#include "slice/valuation.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slice {

// Ordered variable bindings; lookup finds the innermost.
class Env {
 public:
  void push(std::string name, Value v) { entries_.emplace_back(std::move(name), std::move(v)); }
  void pop() { entries_.pop_back(); }
  const Value* lookup(const std::string& name) const;

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

struct MarkEvent {
  int var = 0;  // index of the fresh variable the translation assigns to this query
  AgentId agent;
  Rational position;
};

struct BranchEvent {
  int var = 0;  // fresh variable of the if-node under impl numbering
  Value value;
};

// Marks in execution order. Branch events are recorded only under impl numbering.
struct Trace {
  std::vector<MarkEvent> marks;
  std::vector<BranchEvent> branches;
  std::vector<Rational> positions() const;
};

struct Evaluation {
  Value value;
  Trace trace;
};

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind { DivOutOfBounds, MarkInfeasible };
  RuntimeError(Kind kind, const std::string& msg, SourceLoc loc)
      : std::runtime_error(to_string(loc) + ": " + msg), kind_(kind), loc_(loc) {}
  Kind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  Kind kind_;
  SourceLoc loc_;
};

// Big-step evaluation. One valuation and one policy per agent; a single
// policy applies to every agent. Throws RuntimeError when stuck.
Evaluation evaluate(const ExprPtr& e, std::span<const PiecewiseValuation> profile,
                    std::span<const MarkPolicy> policies, IteMode numbering = IteMode::core);
Evaluation evaluate(const Program& p, std::span<const PiecewiseValuation> profile,
                    std::span<const MarkPolicy> policies, IteMode numbering = IteMode::core);

}  // namespace slice
