#include "slice/cli.hpp"

#include "slice/interp.hpp"
#include "slice/testkit.hpp"
#include "slice/typecheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace slice::cli {

namespace fs = std::filesystem;
using slice::to_string;

std::string to_string(Property p) { return p == Property::envy ? "envy-free" : "progress"; }

Compiled compile(const Program& p, const CompileOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  Compiled c;
  c.agents = p.agent_count;
  ExprPtr e = desugar(p);
  infer(e);
  c.paths = count_paths(e);
  logic::FormulaPtr goal = opts.property == Property::envy
                               ? envy_goal(e, p.agent_count, opts.ite, opts.translate)
                               : progress_goal(e, opts.ite, opts.translate);
  c.constraint_size = logic::dag_size(goal);
  auto axioms = smt::axioms(p.agent_count, opts.solver.literal_order_axioms);
  c.script = smt::emit(goal, axioms, opts.solver);
  c.constraint_lines = static_cast<int>(std::count(c.script.begin(), c.script.end(), '\n'));
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

int exit_code(smt::Verdict::Outcome o) {
  switch (o) {
    case smt::Verdict::Outcome::unsat: return 0;
    case smt::Verdict::Outcome::sat: return 1;
    default: return 2;
  }
}

std::string to_json(const std::vector<Report>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"protocol", r.protocol},
                   {"property", to_string(r.property)},
                   {"verdict", smt::to_string(r.verdict.outcome)},
                   {"solver", smt::to_string(r.solver)},
                   {"seconds", r.seconds},
                   {"script", r.script_path},
                   {"paths", r.paths},
                   {"constraint_size", r.constraint_size}});
  }
  return arr.dump(2) + "\n";
}

namespace {

struct CommonFlags {
  std::string file;
  std::string property = "envy";
  std::string ite = "impl";
  std::string axioms = "quantified";
  std::string logic;
  bool literal_order = false;
  bool no_mark_range = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("file", f.file, "protocol file")->required();
  cmd->add_option("--property", f.property, "envy or progress")
      ->check(CLI::IsMember({"envy", "envy-free", "progress"}));
  cmd->add_option("--ite", f.ite, "numbering of conditionals: core or impl")->check(CLI::IsMember({"core", "impl"}));
  cmd->add_option("--axioms", f.axioms, "quantified, or ground to add ground instances")
      ->check(CLI::IsMember({"quantified", "ground", "instantiated"}));
  cmd->add_option("--logic", f.logic, "SMT-LIB logic (default: chosen from the goal)");
  cmd->add_flag("--literal-order-axioms", f.literal_order, "use the non-strict order axioms");
  cmd->add_flag("--no-mark-range", f.no_mark_range, "omit the range constraint on mark results");
}

CompileOptions options_of(const CommonFlags& f) {
  CompileOptions o;
  o.property = f.property == "progress" ? Property::progress : Property::envy;
  o.ite = f.ite == "core" ? IteMode::core : IteMode::impl;
  o.translate.mark_range = !f.no_mark_range;
  o.solver.logic = f.logic;
  o.solver.axioms = f.axioms == "quantified" ? smt::AxiomMode::quantified : smt::AxiomMode::instantiated;
  o.solver.literal_order_axioms = f.literal_order;
  return o;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string protocol_name(const std::string& file) { return fs::path(file).stem().string(); }

// Loads and compiles; reports front-end errors and returns 3 through `code`.
bool load_and_compile(const std::string& file, const CompileOptions& opts, Compiled& out, std::ostream& err,
                      int& code) {
  try {
    out = compile(load_program(file), opts);
    return true;
  } catch (const ParseError& e) {
    err << file << ":" << e.what() << "\n";
  } catch (const TypeError& e) {
    err << file << ":" << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << file << ": " << e.what() << "\n";
  } catch (const std::overflow_error& e) {
    err << file << ": " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    err << e.what() << "\n";
  }
  code = 3;
  return false;
}

std::vector<smt::Solver> solvers_of(const std::string& s) {
  if (s == "both") return {smt::Solver::z3, smt::Solver::cvc5};
  return {smt::parse_solver(s)};
}

std::string format_seconds(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << s;
  return o.str();
}

std::string describe(smt::Verdict::Outcome o, Property p) {
  switch (o) {
    case smt::Verdict::Outcome::unsat: return p == Property::envy ? "verified (unsat)" : "progress holds (unsat)";
    case smt::Verdict::Outcome::sat: return "counterexample (sat)";
    case smt::Verdict::Outcome::unknown: return "inconclusive (unknown)";
    case smt::Verdict::Outcome::timeout: return "inconclusive (timeout)";
    case smt::Verdict::Outcome::error: return "inconclusive (solver error)";
  }
  return "";
}

int cmd_check(const CommonFlags& f, const std::string& solver, double timeout, const std::string& keep,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  CompileOptions opts = options_of(f);
  opts.solver.timeout_seconds = timeout;
  Compiled c;
  int code = 0;
  if (!load_and_compile(f.file, opts, c, err, code)) return code;
  std::string name = protocol_name(f.file);
  std::string script_path;
  if (!keep.empty()) {
    fs::create_directories(keep);
    script_path = (fs::path(keep) / (name + "." + (opts.property == Property::envy ? "envy" : "progress") + ".smt2"))
                      .string();
    std::ofstream(script_path, std::ios::binary) << c.script;
  }
  std::vector<Report> reports;
  for (smt::Solver s : solvers_of(solver)) {
    smt::SolverConfig cfg = opts.solver;
    cfg.solver = s;
    Report r;
    r.protocol = name;
    r.property = opts.property;
    r.solver = s;
    r.verdict = smt::run(c.script, cfg);
    r.seconds = r.verdict.seconds;
    r.script_path = script_path;
    r.paths = c.paths;
    r.constraint_size = c.constraint_size;
    out << name << " " << to_string(r.property) << " " << smt::to_string(s) << ": "
        << describe(r.verdict.outcome, r.property) << " in " << format_seconds(r.seconds) << " s\n";
    if (r.verdict.outcome == smt::Verdict::Outcome::sat) out << r.verdict.model;
    if (r.verdict.outcome == smt::Verdict::Outcome::error || r.verdict.outcome == smt::Verdict::Outcome::unknown)
      err << r.verdict.diagnostics << (r.verdict.diagnostics.ends_with('\n') ? "" : "\n");
    reports.push_back(std::move(r));
  }
  if (!out_path.empty()) std::ofstream(out_path) << to_json(reports);
  bool any_unsat = false;
  for (const auto& r : reports) {
    if (r.verdict.outcome == smt::Verdict::Outcome::sat) return 1;
    any_unsat = any_unsat || r.verdict.outcome == smt::Verdict::Outcome::unsat;
  }
  return any_unsat ? 0 : 2;
}

int cmd_emit(const CommonFlags& f, std::ostream& out, std::ostream& err) {
  Compiled c;
  int code = 0;
  if (!load_and_compile(f.file, options_of(f), c, err, code)) return code;
  out << c.script;
  return 0;
}

std::string piece_string(const Value& piece) {
  if (piece.is_interval()) return to_string(piece);
  std::string s;
  for (const auto& c : piece.as_tuple()) s += (s.empty() ? "" : " ") + piece_string(c);
  return s;
}

int cmd_run(const std::string& file, const std::string& profile_file, const std::vector<std::string>& policy_names,
            std::ostream& out, std::ostream& err) {
  Program p;
  try {
    p = load_program(file);
    infer(desugar(p));
  } catch (const ParseError& e) {
    err << file << ":" << e.what() << "\n";
    return 3;
  } catch (const TypeError& e) {
    err << file << ":" << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    err << e.what() << "\n";
    return 3;
  }
  std::vector<PiecewiseValuation> profile;
  std::vector<MarkPolicy> policies;
  try {
    profile = parse_profile(read_file(profile_file));
    for (const auto& name : policy_names) policies.push_back(parse_policy(name));
  } catch (const std::exception& e) {
    err << profile_file << ": " << e.what() << "\n";
    return 4;
  }
  if (policies.empty()) policies.push_back(MarkPolicy::leftmost());
  if (static_cast<int>(profile.size()) != p.agent_count) {
    err << profile_file << ": " << profile.size() << " valuations for " << p.agent_count << " agents\n";
    return 4;
  }
  if (policies.size() != 1 && static_cast<int>(policies.size()) != p.agent_count) {
    err << policies.size() << " policies for " << p.agent_count << " agents\n";
    return 4;
  }
  Evaluation ev;
  try {
    ev = evaluate(p, profile, policies);
  } catch (const RuntimeError& e) {
    err << file << ":" << e.what() << "\n";
    return 4;
  }
  testkit::EnvyReport env;
  try {
    env = testkit::envy_check(ev.value, profile);
  } catch (const std::exception& e) {
    err << "output " << to_string(ev.value) << " is not an allocation: " << e.what() << "\n";
    return 4;
  }
  std::vector<Value> pieces = p.agent_count == 1 ? std::vector<Value>{ev.value} : ev.value.as_tuple();
  for (std::size_t a = 0; a < pieces.size(); ++a) out << "agent" << a + 1 << ": " << piece_string(pieces[a]) << "\n";
  out << "values (row: agent, column: piece of agent)\n";
  for (std::size_t a = 0; a < env.matrix.values.size(); ++a) {
    out << "  " << a + 1 << ":";
    for (const auto& v : env.matrix.values[a]) out << " " << to_string(v);
    out << "\n";
  }
  out << "envy-free: " << (env.envy_free ? "yes" : "no") << "\n";
  if (!ev.trace.marks.empty()) {
    out << "marks:";
    for (const auto& m : ev.trace.marks)
      out << " y" << m.var << "=" << to_string(m.position) << " (agent " << m.agent.index << ")";
    out << "\n";
  }
  return 0;
}

int cmd_paths(const std::string& file, std::ostream& out, std::ostream& err) {
  try {
    out << count_paths(desugar(load_program(file))) << "\n";
    return 0;
  } catch (const ParseError& e) {
    err << file << ":" << e.what() << "\n";
  } catch (const std::exception& e) {
    err << file << ": " << e.what() << "\n";
  }
  return 3;
}

int cmd_bench(const std::string& dir, int runs, const std::string& solver, double timeout, const std::string& ite,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(dir)) {
    err << dir << ": not a directory\n";
    return 64;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".slice") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<smt::Solver> solvers = solvers_of(solver);

  out << std::left << std::setw(34) << "protocol" << std::right << std::setw(7) << "lines" << std::setw(12)
      << "constraint" << std::setw(12) << "compile(s)";
  for (auto s : solvers) out << std::setw(12) << (smt::to_string(s) + "(s)");
  out << "\n";

  std::vector<Report> reports;
  int code = 0;
  for (const auto& path : files) {
    CompileOptions opts;
    opts.ite = ite == "core" ? IteMode::core : IteMode::impl;
    opts.solver.timeout_seconds = timeout;
    Compiled c;
    int lines = 0;
    try {
      lines = count_program_lines(read_file(path));
    } catch (const std::exception&) {
    }
    int front = 0;
    if (!load_and_compile(path.string(), opts, c, err, front)) {
      code = std::max(code, front);
      continue;
    }
    std::string name = path.stem().string();
    out << std::left << std::setw(34) << name << std::right << std::setw(7) << lines << std::setw(12)
        << c.constraint_lines << std::setw(12) << format_seconds(c.seconds);
    for (auto s : solvers) {
      std::string cell;
      if (!smt::find_solver(s)) {
        cell = "unavailable";
      } else {
        smt::SolverConfig cfg = opts.solver;
        cfg.solver = s;
        double total = 0;
        Report r;
        for (int i = 0; i < runs; ++i) {
          r.verdict = smt::run(c.script, cfg);
          total += r.verdict.seconds;
          if (r.verdict.outcome != smt::Verdict::Outcome::unsat) break;
        }
        r.protocol = name;
        r.property = Property::envy;
        r.solver = s;
        r.seconds = r.verdict.outcome == smt::Verdict::Outcome::unsat ? total / runs : r.verdict.seconds;
        r.paths = c.paths;
        r.constraint_size = c.constraint_size;
        cell = r.verdict.outcome == smt::Verdict::Outcome::unsat ? format_seconds(r.seconds) : "failed";
        reports.push_back(std::move(r));
      }
      out << std::setw(12) << cell;
    }
    out << "\n";
  }
  if (!out_path.empty()) std::ofstream(out_path) << to_json(reports);
  return code;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verifier and interpreter for cake-cutting protocols", "slice"};
  app.require_subcommand(1);

  CommonFlags check_flags, emit_flags;
  std::string solver = "z3", keep, out_path;
  double timeout = 300;
  auto* check = app.add_subcommand("check", "verify envy-freeness or progress with an SMT solver");
  add_common(check, check_flags);
  check->add_option("--solver", solver, "z3, cvc5 or both")->check(CLI::IsMember({"z3", "cvc5", "both"}));
  check->add_option("--timeout", timeout, "seconds per solver run")->check(CLI::PositiveNumber);
  check->add_option("--keep", keep, "directory to keep the emitted script in");
  check->add_option("--out", out_path, "write reports as JSON");

  auto* emit = app.add_subcommand("emit", "print the SMT-LIB script that check would run");
  add_common(emit, emit_flags);

  std::string run_file, profile_file;
  std::vector<std::string> policies;
  auto* run = app.add_subcommand("run", "execute a protocol on a valuation profile");
  run->add_option("file", run_file, "protocol file")->required();
  run->add_option("profile", profile_file, "valuation profile, one agent per line")->required();
  run->add_option("--policy", policies, "leftmost, rightmost or offset:t; once, or once per agent");

  std::string bench_dir, bench_solver = "both", bench_ite = "impl", bench_out;
  int runs = 5;
  double bench_timeout = 300;
  auto* bench = app.add_subcommand("bench", "check envy-freeness of every protocol in a directory");
  bench->add_option("dir", bench_dir, "corpus directory")->required();
  bench->add_option("--runs", runs, "runs averaged per cell")->check(CLI::PositiveNumber);
  bench->add_option("--solver", bench_solver, "z3, cvc5 or both")->check(CLI::IsMember({"z3", "cvc5", "both"}));
  bench->add_option("--timeout", bench_timeout, "seconds per solver run")->check(CLI::PositiveNumber);
  bench->add_option("--ite", bench_ite, "core or impl")->check(CLI::IsMember({"core", "impl"}));
  bench->add_option("--out", bench_out, "write reports as JSON");

  std::string paths_file;
  auto* paths = app.add_subcommand("paths", "count control-flow paths");
  paths->add_option("file", paths_file, "protocol file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 64;
  }

  if (check->parsed()) return cmd_check(check_flags, solver, timeout, keep, out_path, out, err);
  if (emit->parsed()) return cmd_emit(emit_flags, out, err);
  if (run->parsed()) return cmd_run(run_file, profile_file, policies, out, err);
  if (bench->parsed()) return cmd_bench(bench_dir, runs, bench_solver, bench_timeout, bench_ite, bench_out, out, err);
  return cmd_paths(paths_file, out, err);
}

}  // namespace slice::cli
