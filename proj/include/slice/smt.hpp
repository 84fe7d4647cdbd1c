#pragma once

#include "slice/logic.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slice::smt {

enum class Solver { z3, cvc5 };

enum class AxiomMode {
  quantified,    // universally quantified valuation axioms
  instantiated,  // the same, plus ground instances over the valuation terms of the goal
};

struct SolverConfig {
  Solver solver = Solver::z3;
  double timeout_seconds = 300;
  // Empty selects UFLRA, or UFNRA when the goal multiplies two non-constants.
  std::string logic;
  AxiomMode axioms = AxiomMode::quantified;
  // Use the non-strict order axioms (7 and 8) verbatim instead of their strict variants.
  bool literal_order_axioms = false;
};

struct Verdict {
  enum class Outcome { unsat, sat, unknown, timeout, error };
  Outcome outcome = Outcome::error;
  std::string model;        // solver output after "sat"
  std::string diagnostics;  // everything the solver printed, or why it could not run
  double seconds = 0;
};

std::string to_string(Solver s);
Solver parse_solver(std::string_view text);
std::string to_string(Verdict::Outcome o);

// Valuation axioms for agents 1..n over intervals inside [0,1].
std::vector<logic::FormulaPtr> axioms(int n_agents, bool literal_order_axioms = false);

// SMT-LIB 2.6 script asserting the goal together with the axioms. The goal must
// be closed; existentials in positive position become constants. Output is a
// deterministic function of its arguments and does not depend on cfg.solver.
std::string emit(const logic::FormulaPtr& goal, const std::vector<logic::FormulaPtr>& axioms,
                 const SolverConfig& cfg);

// Directories in SLICE_SOLVER_PATH (colon separated) are searched before PATH.
std::optional<std::string> find_solver(Solver s);

// Runs the solver as a subprocess, killing it once the timeout expires.
Verdict run(const std::string& script, const SolverConfig& cfg);

}  // namespace slice::smt
