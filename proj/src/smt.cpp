#include "slice/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace slice::smt {

using namespace logic;

std::string to_string(Solver s) { return s == Solver::z3 ? "z3" : "cvc5"; }

Solver parse_solver(std::string_view text) {
  if (text == "z3") return Solver::z3;
  if (text == "cvc5") return Solver::cvc5;
  throw std::invalid_argument("unknown solver '" + std::string(text) + "'");
}

std::string to_string(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::unsat: return "unsat";
    case Verdict::Outcome::sat: return "sat";
    case Verdict::Outcome::unknown: return "unknown";
    case Verdict::Outcome::timeout: return "timeout";
    case Verdict::Outcome::error: return "error";
  }
  return "?";
}

std::vector<FormulaPtr> axioms(int n_agents, bool literal_order_axioms) {
  std::vector<FormulaPtr> out;
  auto v = [](const std::string& n) { return tm::var(Var::bound(n)); };
  auto bind = [](std::initializer_list<const char*> names) {
    std::vector<Binder> bs;
    for (const char* n : names) bs.push_back({Var::bound(n), Ty::pos()});
    return bs;
  };
  TermPtr l1 = v("l1"), r1 = v("r1"), l2 = v("l2"), r2 = v("r2");
  FormulaPtr wf1 = fm::ge(r1, l1), wf2 = fm::ge(r2, l2);
  for (int a = 1; a <= n_agents; ++a) {
    auto V = [a](TermPtr lo, TermPtr hi) { return tm::nu(a, tm::interval(std::move(lo), std::move(hi))); };
    TermPtr v1 = V(l1, r1), v2 = V(l2, r2);
    // Normalisation.
    out.push_back(fm::eq(tm::nu(a, tm::constant(Value::interval(0, 1))), tm::num(1)));
    // Non-negativity.
    out.push_back(fm::forall(bind({"l1", "r1"}), fm::implies(wf1, fm::ge(v1, tm::num(0)))));
    // Additivity over adjacent intervals.
    out.push_back(fm::forall(bind({"l1", "r1", "r2"}),
                             fm::implies(fm::conj(wf1, fm::ge(r2, r1)),
                                         fm::eq(tm::op(PrimOp::Add, {v1, V(r1, r2)}), V(l1, r2)))));
    // Monotonicity under inclusion.
    out.push_back(fm::forall(bind({"l1", "r1", "l2", "r2"}),
                             fm::implies(fm::conj({wf1, wf2, fm::ge(l2, l1), fm::ge(r1, r2)}), fm::ge(v1, v2))));
    // Bounded by one.
    out.push_back(fm::forall(bind({"l1", "r1"}), fm::implies(wf1, fm::ge(tm::num(1), v1))));
    // Points are worthless.
    out.push_back(fm::forall(bind({"r1"}), fm::eq(V(r1, r1), tm::num(0))));
    // Order axioms relating endpoints and values.
    if (literal_order_axioms) {
      out.push_back(fm::forall(bind({"l1", "r1", "l2", "r2"}),
                               fm::implies(fm::conj({wf1, wf2, fm::ge(l1, l2), fm::ge(v1, v2)}), fm::ge(r1, r2))));
      out.push_back(fm::forall(bind({"l1", "r1", "l2", "r2"}),
                               fm::implies(fm::conj({wf1, wf2, fm::ge(r1, r2), fm::ge(v2, v1)}), fm::ge(l1, l2))));
    } else {
      out.push_back(fm::forall(bind({"l1", "r1", "l2", "r2"}),
                               fm::implies(fm::conj({wf1, wf2, fm::ge(l1, l2), fm::neg(fm::ge(v2, v1))}),
                                           fm::neg(fm::ge(r2, r1)))));
      out.push_back(fm::forall(bind({"l1", "r1", "l2", "r2"}),
                               fm::implies(fm::conj({wf1, wf2, fm::ge(r1, r2), fm::neg(fm::ge(v1, v2))}),
                                           fm::neg(fm::ge(l2, l1)))));
    }
  }
  return out;
}

namespace {

std::string real_literal(const Rational& r) {
  Rational m = abs(r);
  std::string body = m.get_den() == 1 ? m.get_num().get_str() + ".0"
                                      : "(/ " + m.get_num().get_str() + ".0 " + m.get_den().get_str() + ".0)";
  return r < 0 ? "(- " + body + ")" : body;
}

// Scalar SMT expressions, hash-consed so shared subterms are emitted once.
struct Node {
  std::string head;
  std::vector<int> args;
  bool boolean = false;
  bool ground = true;
};

// A lowered term: a scalar node, or the components of an interval or tuple.
struct Flat {
  int node = -1;
  std::vector<Flat> parts;
  bool scalar() const { return node >= 0; }
};

struct Scope {
  const Scope* parent = nullptr;
  std::map<Var, Flat> vars;
  std::unordered_map<const Term*, Flat> memo;

  const Flat* lookup(const Var& v) const {
    for (const Scope* s = this; s; s = s->parent)
      if (auto it = s->vars.find(v); it != s->vars.end()) return &it->second;
    return nullptr;
  }
};

class Emitter {
 public:
  explicit Emitter(const SolverConfig& cfg) : cfg_(cfg) {}

  std::string run(const FormulaPtr& goal, const std::vector<FormulaPtr>& axs) {
    Scope root;
    std::vector<int> axiom_roots, goal_roots;
    for (const auto& a : axs) axiom_roots.push_back(formula(a, true, root));
    int g = formula(goal, true, root);
    split_conjunction(g, goal_roots);
    std::vector<int> instance_roots;
    if (cfg_.axioms == AxiomMode::instantiated) instance_roots = instances();
    return print(axiom_roots, instance_roots, goal_roots);
  }

 private:
  int mk(std::string head, std::vector<int> args, bool boolean, bool ground = true) {
    for (int a : args) ground = ground && nodes_[a].ground;
    auto key = std::make_pair(head, args);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    nodes_.push_back({std::move(head), std::move(args), boolean, ground});
    int id = static_cast<int>(nodes_.size()) - 1;
    index_.emplace(std::move(key), id);
    if (nodes_[id].head.starts_with("nu_") && nodes_[id].ground) nu_terms_.push_back(id);
    return id;
  }

  int atom(std::string text, bool boolean, bool ground = true) { return mk(std::move(text), {}, boolean, ground); }
  int truth(bool b) { return atom(b ? "true" : "false", true); }

  int nary(const std::string& head, std::vector<int> args, bool unit) {
    std::vector<int> kept;
    for (int a : args) {
      if (a == truth(unit)) continue;
      if (a == truth(!unit)) return truth(!unit);
      kept.push_back(a);
    }
    if (kept.empty()) return truth(unit);
    if (kept.size() == 1) return kept[0];
    return mk(head, std::move(kept), true);
  }
  int conj(std::vector<int> args) { return nary("and", std::move(args), true); }
  int disj(std::vector<int> args) { return nary("or", std::move(args), false); }
  int negate(int a) {
    if (a == truth(true)) return truth(false);
    if (a == truth(false)) return truth(true);
    return mk("not", {a}, true);
  }
  int implies(int a, int b) {
    if (a == truth(true)) return b;
    if (a == truth(false) || b == truth(true)) return truth(true);
    return mk("=>", {a, b}, true);
  }

  int scalar(const Flat& f) const {
    if (!f.scalar()) throw std::logic_error("expected a scalar term");
    return f.node;
  }

  int equal(const Flat& a, const Flat& b) {
    if (a.scalar() != b.scalar() || a.parts.size() != b.parts.size())
      throw std::logic_error("equation between terms of different shapes");
    if (a.scalar()) {
      if (a.node == b.node) return truth(true);
      return mk("=", {a.node, b.node}, true);
    }
    std::vector<int> parts;
    for (std::size_t i = 0; i < a.parts.size(); ++i) parts.push_back(equal(a.parts[i], b.parts[i]));
    return conj(parts);
  }

  Flat choose(int c, const Flat& a, const Flat& b) {
    if (a.scalar() != b.scalar() || a.parts.size() != b.parts.size())
      throw std::logic_error("ite between terms of different shapes");
    if (a.scalar()) return {a.node == b.node ? a.node : mk("ite", {c, a.node, b.node}, nodes_[a.node].boolean), {}};
    Flat out;
    for (std::size_t i = 0; i < a.parts.size(); ++i) out.parts.push_back(choose(c, a.parts[i], b.parts[i]));
    return out;
  }

  int literal(const Rational& r) {
    int id = atom(real_literal(r), false);
    literals_.insert(id);
    return id;
  }

  Flat value(const Value& v) {
    if (v.is_number()) return {literal(v.as_number()), {}};
    if (v.is_boolean()) return {truth(v.as_boolean()), {}};
    if (v.is_interval()) {
      const auto& i = v.as_interval();
      return {-1, {{literal(i.lo), {}}, {literal(i.hi), {}}}};
    }
    Flat out;
    for (const auto& c : v.as_tuple()) out.parts.push_back(value(c));
    return out;
  }

  Flat term(const TermPtr& t, Scope& scope) {
    if (auto it = scope.memo.find(t.get()); it != scope.memo.end()) return it->second;
    Flat out = compute(*t, scope);
    scope.memo.emplace(t.get(), out);
    return out;
  }

  Flat compute(const Term& t, Scope& scope) {
    switch (t.kind) {
      case Term::Kind::var: {
        const Flat* f = scope.lookup(t.var);
        if (!f) throw std::invalid_argument("goal has free variable " + to_string(t.var));
        return *f;
      }
      case Term::Kind::constant: return value(t.value);
      case Term::Kind::app: break;
    }
    std::vector<Flat> args;
    for (const auto& a : t.args) args.push_back(term(a, scope));
    switch (t.fn) {
      case Fn::op: {
        auto bin = [&](const char* head, bool boolean) {
          return Flat{mk(head, {scalar(args[0]), scalar(args[1])}, boolean), {}};
        };
        switch (t.op) {
          case PrimOp::Eq: return {equal(args[0], args[1]), {}};
          case PrimOp::Ne: return {negate(equal(args[0], args[1])), {}};
          case PrimOp::Le: return bin("<=", true);
          case PrimOp::Ge: return bin(">=", true);
          case PrimOp::Add: return bin("+", false);
          case PrimOp::Sub: return bin("-", false);
          case PrimOp::Mul: return bin("*", false);
          case PrimOp::Div: return bin("/", false);
          case PrimOp::And: return {conj({scalar(args[0]), scalar(args[1])}), {}};
          case PrimOp::Or: return {disj({scalar(args[0]), scalar(args[1])}), {}};
          case PrimOp::Not: return {negate(scalar(args[0])), {}};
        }
        break;
      }
      case Fn::tuple:
      case Fn::interval: return {-1, args};
      case Fn::proj:
        if (args[0].scalar() || t.index < 1 || t.index > static_cast<int>(args[0].parts.size()))
          throw std::invalid_argument("ill-sorted projection " + to_string(TermPtr(std::make_shared<Term>(t))));
        return args[0].parts[t.index - 1];
      case Fn::ite: return choose(scalar(args[0]), args[1], args[2]);
      case Fn::left:
      case Fn::right:
        if (args[0].scalar() || args[0].parts.size() != 2) throw std::invalid_argument("endpoint of a non-interval");
        return args[0].parts[t.fn == Fn::left ? 0 : 1];
      case Fn::nu: {
        if (args[0].scalar() || args[0].parts.size() != 2) throw std::invalid_argument("valuation of a non-interval");
        agents_.insert(t.index);
        return {mk("nu_" + std::to_string(t.index), {scalar(args[0].parts[0]), scalar(args[0].parts[1])}, false), {}};
      }
    }
    throw std::logic_error("unknown term");
  }

  std::string base_name(const Var& v) const {
    switch (v.kind) {
      case VarKind::y: return "y" + std::to_string(v.index);
      case VarKind::x: return "x_" + v.name;
      case VarKind::ret: return v.index == 0 ? "ret" : "ret" + std::to_string(v.index);
      case VarKind::bound: return v.name;
    }
    return "v";
  }

  std::string unique(const std::string& base) {
    int& n = used_names_[base];
    ++n;
    return n == 1 ? base : base + "!" + std::to_string(n);
  }

  struct Leaf {
    std::string name;
    bool boolean;
    bool unit;  // constrained to [0,1]
  };

  void leaves(const Ty& sort, const std::string& base, std::vector<Leaf>& out, Flat& shape) {
    switch (sort.kind()) {
      case Ty::Kind::Bool: out.push_back({base, true, false}); break;
      case Ty::Kind::Nat:
      case Ty::Kind::Real: out.push_back({base, false, false}); break;
      case Ty::Kind::Pos: out.push_back({base, false, true}); break;
      case Ty::Kind::Interval:
        out.push_back({base + "_lo", false, true});
        out.push_back({base + "_hi", false, true});
        shape.parts = {{-2, {}}, {-2, {}}};
        return;
      case Ty::Kind::Product:
        for (std::size_t i = 0; i < sort.elems().size(); ++i) {
          Flat part;
          leaves(sort.elems()[i], base + "_" + std::to_string(i + 1), out, part);
          shape.parts.push_back(part);
        }
        return;
    }
    shape.node = -2;
  }

  // Fills the placeholder slots of `shape` with the nodes for `names`, in order.
  void fill(Flat& shape, const std::vector<int>& nodes, std::size_t& next) {
    if (shape.node == -2) {
      shape.node = nodes[next++];
      return;
    }
    for (auto& p : shape.parts) fill(p, nodes, next);
  }

  int formula(const FormulaPtr& f, bool positive, Scope& scope) {
    switch (f->kind) {
      case FKind::top: return truth(true);
      case FKind::bottom: return truth(false);
      case FKind::eq: return equal(term(f->lhs, scope), term(f->rhs, scope));
      case FKind::ge: return mk(">=", {scalar(term(f->lhs, scope)), scalar(term(f->rhs, scope))}, true);
      case FKind::neg: return negate(formula(f->parts[0], !positive, scope));
      case FKind::conj:
      case FKind::disj: {
        std::vector<int> parts;
        for (const auto& p : f->parts) parts.push_back(formula(p, positive, scope));
        return f->kind == FKind::conj ? conj(parts) : disj(parts);
      }
      case FKind::implies:
        return implies(formula(f->parts[0], !positive, scope), formula(f->parts[1], positive, scope));
      case FKind::forall:
      case FKind::exists: break;
    }
    bool exists = f->kind == FKind::exists;
    bool skolem = exists == positive;
    Scope inner;
    inner.parent = &scope;
    std::vector<Leaf> all;
    for (const auto& b : f->binders) {
      std::vector<Leaf> ls;
      Flat shape;
      leaves(b.sort, base_name(b.var), ls, shape);
      std::vector<int> nodes;
      for (auto& l : ls) {
        if (skolem) l.name = unique(l.name);
        if (skolem) {
          declarations_.push_back(l);
          nodes.push_back(atom(l.name, l.boolean));
        } else {
          nodes.push_back(atom(l.name, l.boolean, false));
        }
        all.push_back(l);
      }
      std::size_t next = 0;
      fill(shape, nodes, next);
      inner.vars.emplace(b.var, shape);
    }
    std::vector<int> guards;
    for (const auto& l : all)
      if (l.unit) {
        int v = atom(l.name, false, !skolem);
        guards.push_back(mk("<=", {atom("0.0", false), v}, true));
        guards.push_back(mk("<=", {v, atom("1.0", false)}, true));
      }
    int body = formula(f->parts[0], positive, inner);
    int guarded = exists ? conj({conj(guards), body}) : implies(conj(guards), body);
    if (skolem) return guarded;
    std::string head = exists ? "exists" : "forall";
    head += " (";
    for (std::size_t i = 0; i < all.size(); ++i)
      head += (i ? " (" : "(") + all[i].name + (all[i].boolean ? " Bool)" : " Real)");
    head += ")";
    return mk(head, {guarded}, true, false);
  }

  void split_conjunction(int n, std::vector<int>& out) {
    if (nodes_[n].head == "and") {
      for (int a : nodes_[n].args) split_conjunction(a, out);
    } else {
      out.push_back(n);
    }
  }

  std::vector<int> instances() {
    std::vector<int> out;
    std::map<int, std::vector<int>> by_agent;
    for (int id : std::vector<int>(nu_terms_)) by_agent[std::stoi(nodes_[id].head.substr(3))].push_back(id);
    int zero = atom("0.0", false), one = atom("1.0", false);
    auto wf = [&](int t) {
      int lo = nodes_[t].args[0], hi = nodes_[t].args[1];
      return conj({mk("<=", {zero, lo}, true), mk("<=", {lo, hi}, true), mk("<=", {hi, one}, true)});
    };
    auto ge = [&](int a, int b) { return mk(">=", {a, b}, true); };
    for (const auto& [agent, terms] : by_agent) {
      for (int t : terms) {
        int lo = nodes_[t].args[0], hi = nodes_[t].args[1];
        out.push_back(implies(wf(t), conj({ge(t, zero), ge(one, t)})));
        out.push_back(implies(mk("=", {lo, hi}, true), mk("=", {t, zero}, true)));
      }
      for (int t1 : terms)
        for (int t2 : terms) {
          if (t1 == t2) continue;
          int l1 = nodes_[t1].args[0], r1 = nodes_[t1].args[1], l2 = nodes_[t2].args[0], r2 = nodes_[t2].args[1];
          int both = conj({wf(t1), wf(t2)});
          out.push_back(implies(conj({both, ge(l2, l1), ge(r1, r2)}), ge(t1, t2)));
          if (r1 == l2) {
            int whole = mk(nodes_[t1].head, {l1, r2}, false);
            out.push_back(implies(both, mk("=", {mk("+", {t1, t2}, false), whole}, true)));
          }
        }
    }
    return out;
  }

  std::string sort_name(int n) const { return nodes_[n].boolean ? "Bool" : "Real"; }

  void print_node(int n, std::ostream& os, int defining, bool use_shared = true) const {
    const Node& node = nodes_[n];
    if (use_shared && n != defining && shared_.contains(n)) {
      os << "t" << shared_.at(n);
      return;
    }
    if (node.args.empty()) {
      os << node.head;
      return;
    }
    os << "(" << node.head;
    for (int a : node.args) {
      os << " ";
      print_node(a, os, defining, use_shared);
    }
    os << ")";
  }

  std::string print(const std::vector<int>& axiom_roots, const std::vector<int>& instance_roots,
                    const std::vector<int>& goal_roots) {
    std::map<int, int> refs;
    std::set<int> seen;
    std::vector<int> stack(goal_roots.begin(), goal_roots.end());
    stack.insert(stack.end(), instance_roots.begin(), instance_roots.end());
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      for (int a : nodes_[n].args) {
        ++refs[a];
        stack.push_back(a);
      }
    }
    int counter = 0;
    for (const auto& [n, count] : refs)
      if (count > 1 && nodes_[n].ground && !nodes_[n].args.empty() && !nodes_[n].head.starts_with("nu_"))
        shared_.emplace(n, counter++);

    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    std::string logic = cfg_.logic;
    if (logic.empty()) {
      logic = "UFLRA";
      for (const auto& n : nodes_)
        if (n.head == "*" && !literals_.contains(n.args[0]) && !literals_.contains(n.args[1])) logic = "UFNRA";
    }
    os << "(set-logic " << logic << ")\n";
    for (int a : agents_) os << "(declare-fun nu_" << a << " (Real Real) Real)\n";
    for (const auto& r : axiom_roots) {
      os << "(assert ";
      print_node(r, os, -1, false);
      os << ")\n";
    }
    for (const auto& d : declarations_) os << "(declare-const " << d.name << (d.boolean ? " Bool" : " Real") << ")\n";
    for (const auto& [n, id] : shared_) {
      os << "(define-fun t" << id << " () " << sort_name(n) << " ";
      print_node(n, os, n);
      os << ")\n";
    }
    for (int r : instance_roots) {
      os << "(assert ";
      print_node(r, os, -1);
      os << ")\n";
    }
    for (int r : goal_roots) {
      os << "(assert ";
      print_node(r, os, -1);
      os << ")\n";
    }
    os << "(check-sat)\n(get-model)\n";
    return os.str();
  }

  const SolverConfig& cfg_;
  std::vector<Node> nodes_;
  std::map<std::pair<std::string, std::vector<int>>, int> index_;
  std::vector<int> nu_terms_;
  std::set<int> agents_;
  std::map<std::string, int> used_names_;
  std::vector<Leaf> declarations_;
  std::map<int, int> shared_;
  std::set<int> literals_;
};

}  // namespace

std::string emit(const FormulaPtr& goal, const std::vector<FormulaPtr>& axs, const SolverConfig& cfg) {
  return Emitter(cfg).run(goal, axs);
}

std::optional<std::string> find_solver(Solver s) {
  std::string name = to_string(s);
  std::vector<std::string> dirs;
  auto split = [&](const char* env) {
    if (!env) return;
    std::string v(env);
    std::size_t start = 0;
    while (start <= v.size()) {
      std::size_t end = v.find(':', start);
      if (end == std::string::npos) end = v.size();
      if (end > start) dirs.push_back(v.substr(start, end - start));
      start = end + 1;
    }
  };
  split(std::getenv("SLICE_SOLVER_PATH"));
  split(std::getenv("PATH"));
  for (const auto& d : dirs) {
    std::filesystem::path p = std::filesystem::path(d) / name;
    if (::access(p.c_str(), X_OK) == 0 && std::filesystem::is_regular_file(p)) return p.string();
  }
  return std::nullopt;
}

namespace {

std::string first_line(const std::string& s, std::size_t& end) {
  std::size_t start = s.find_first_not_of(" \t\r\n");
  if (start == std::string::npos) {
    end = s.size();
    return "";
  }
  end = s.find('\n', start);
  if (end == std::string::npos) end = s.size();
  std::string line = s.substr(start, end - start);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

}  // namespace

Verdict run(const std::string& script, const SolverConfig& cfg) {
  Verdict v;
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto bin = find_solver(cfg.solver);
  if (!bin) {
    v.diagnostics = to_string(cfg.solver) + " not found in SLICE_SOLVER_PATH or PATH";
    return v;
  }
  std::filesystem::path dir = std::filesystem::temp_directory_path();
  std::string templ = (dir / "slice-XXXXXX.smt2").string();
  int fd = ::mkstemps(templ.data(), 5);
  if (fd < 0) {
    v.diagnostics = "cannot create temporary script file";
    return v;
  }
  {
    std::size_t off = 0;
    while (off < script.size()) {
      ssize_t w = ::write(fd, script.data() + off, script.size() - off);
      if (w <= 0) break;
      off += static_cast<std::size_t>(w);
    }
    ::close(fd);
  }
  std::vector<std::string> argv{*bin};
  if (cfg.solver == Solver::z3) {
    argv.push_back("-smt2");
  } else {
    argv.push_back("--lang=smt2");
  }
  argv.push_back(templ);

  int pipefd[2];
  if (::pipe(pipefd) != 0) {
    std::filesystem::remove(templ);
    v.diagnostics = "cannot create pipe";
    return v;
  }
  pid_t pid = ::fork();
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(pipefd[1], 1);
    ::dup2(pipefd[1], 2);
    ::close(pipefd[0]);
    ::close(pipefd[1]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    ::execv(args[0], args.data());
    std::_Exit(127);
  }
  ::close(pipefd[1]);
  if (pid < 0) {
    ::close(pipefd[0]);
    std::filesystem::remove(templ);
    v.diagnostics = "fork failed";
    return v;
  }
  ::setpgid(pid, pid);
  std::string out;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    double left = cfg.timeout_seconds - elapsed();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{pipefd[0], POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(std::min(left, 1.0) * 1000) + 1);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    ssize_t n = ::read(pipefd[0], buf, sizeof buf);
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) ::kill(-pid, SIGKILL);
  ::close(pipefd[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  std::filesystem::remove(templ);
  v.seconds = elapsed();
  v.diagnostics = out;
  if (timed_out) {
    v.outcome = Verdict::Outcome::timeout;
    return v;
  }
  std::size_t end = 0;
  std::string head = first_line(out, end);
  if (head == "unsat") {
    v.outcome = Verdict::Outcome::unsat;
  } else if (head == "sat") {
    v.outcome = Verdict::Outcome::sat;
    v.model = out.substr(std::min(end + 1, out.size()));
  } else if (head == "unknown") {
    v.outcome = Verdict::Outcome::unknown;
  } else {
    v.outcome = Verdict::Outcome::error;
  }
  return v;
}

}  // namespace slice::smt
