#pragma once

#include "slice/parser.hpp"
#include "slice/smt.hpp"
#include "slice/translate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slice::cli {

enum class Property { envy, progress };

std::string to_string(Property p);

struct CompileOptions {
  Property property = Property::envy;
  IteMode ite = IteMode::impl;
  TranslateOptions translate;
  smt::SolverConfig solver;
};

struct Compiled {
  std::string script;
  int agents = 0;
  std::uint64_t paths = 0;
  std::size_t constraint_size = 0;  // goal formula nodes, shared subterms counted once
  int constraint_lines = 0;
  double seconds = 0;  // desugar, typecheck, translate and emit
};

// Throws TypeError (or std::invalid_argument when the output is not an allocation).
Compiled compile(const Program& p, const CompileOptions& opts);

struct Report {
  std::string protocol;
  Property property = Property::envy;
  smt::Verdict verdict;
  smt::Solver solver = smt::Solver::z3;
  double seconds = 0;
  std::string script_path;  // empty unless the script was kept
  std::uint64_t paths = 0;
  std::size_t constraint_size = 0;
};

// 0 unsat, 1 sat, 2 anything else.
int exit_code(smt::Verdict::Outcome o);

// JSON array, one object per report.
std::string to_json(const std::vector<Report>& reports);

// Entry point of the `slice` tool. Exit codes: 0 verified or ok, 1 counterexample,
// 2 inconclusive, 3 parse or type error, 4 runtime or profile error, 64 usage.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slice::cli
