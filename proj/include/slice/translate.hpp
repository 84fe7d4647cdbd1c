#pragma once

#include "slice/core.hpp"
#include "slice/logic.hpp"
#include "slice/typecheck.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace slice {

struct TranslateOptions {
  // Constrain every mark result to [from, 1], as the mark rule does.
  bool mark_range = true;
  // Test hook: omit the equation fixing the value of a mark. Breaks completeness.
  bool drop_mark_equality = false;
};

// (next fresh index, side condition, result term).
struct ConstraintTriple {
  int next = 0;
  logic::FormulaPtr side;
  logic::TermPtr result;
};

ConstraintTriple translate(int k, const ExprPtr& e, IteMode mode = IteMode::core, const TranslateOptions& opts = {});

// side /\ (t = result)
logic::FormulaPtr constraint_of(int k, const ExprPtr& e, const logic::TermPtr& t, IteMode mode = IteMode::core,
                                const TranslateOptions& opts = {});

// Sorts of the fresh variables y_{k+1}..y_{k+N(e)}. Throws TypeError when e is ill-typed.
std::map<int, Ty> fresh_sorts(int k, const ExprPtr& e, IteMode mode = IteMode::core, const TyCtx& ctx = {});

// Sum of an agent's values over the k components of a piece (the piece itself when k = 1).
logic::TermPtr piece_value(int agent, const logic::TermPtr& piece, int k);

// Envy-freeness of the allocation held in `ret`: every agent values its own
// piece at least as much as each other agent's.
logic::FormulaPtr envy_free(const logic::TermPtr& ret, const std::vector<int>& arities);

// exists ret, y. c(0, e, ret) /\ not EF(ret). Unsatisfiable iff e is envy-free.
logic::FormulaPtr envy_goal(const ExprPtr& e, int n_agents, IteMode mode = IteMode::impl,
                            const TranslateOptions& opts = {});

struct Obligation {
  enum class Kind { mark, divide };
  Kind kind = Kind::mark;
  SourceLoc loc;
  logic::FormulaPtr formula;  // closed and universally quantified
};

// The tree of obligations, one per mark and divide node, with its obligations collected in order.
logic::FormulaPtr progress_formula(const ExprPtr& e, IteMode mode, const TranslateOptions& opts,
                                   std::vector<Obligation>* obligations);
std::vector<Obligation> progress_obligations(const ExprPtr& e, IteMode mode = IteMode::impl,
                                             const TranslateOptions& opts = {});
// not ef(0, e, true, empty). Unsatisfiable iff e never gets stuck.
logic::FormulaPtr progress_goal(const ExprPtr& e, IteMode mode = IteMode::impl, const TranslateOptions& opts = {});

// Control-flow paths: leaves count one, an if counts paths(guard) * (paths(then) + paths(else)),
// every other node multiplies its children. Throws std::overflow_error past 2^64.
std::uint64_t count_paths(const ExprPtr& e);

}  // namespace slice
