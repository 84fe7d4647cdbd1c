#include "slice/testkit.hpp"

#include "slice/interp.hpp"
#include "slice/logic.hpp"

#include <stdexcept>

namespace slice::testkit {

using namespace logic;

Rational piece_value(const Value& piece, const PiecewiseValuation& v) {
  if (piece.is_interval()) return v.value_of(piece.as_interval());
  Rational sum = 0;
  for (const auto& c : piece.as_tuple()) sum += piece_value(c, v);
  return sum;
}

EnvyReport envy_check(const Value& allocation, std::span<const PiecewiseValuation> profile) {
  std::vector<Value> pieces;
  if (profile.size() == 1)
    pieces.push_back(allocation);
  else
    pieces = allocation.as_tuple();
  if (pieces.size() != profile.size())
    throw std::invalid_argument("allocation has " + std::to_string(pieces.size()) + " pieces for " +
                                std::to_string(profile.size()) + " agents");
  EnvyReport r;
  for (std::size_t a = 0; a < profile.size(); ++a) {
    std::vector<Rational> row;
    for (const auto& p : pieces) row.push_back(piece_value(p, profile[a]));
    for (const auto& other : row)
      if (other > row[a]) r.envy_free = false;
    r.matrix.values.push_back(std::move(row));
  }
  return r;
}

std::vector<PiecewiseValuation> random_profile(std::uint64_t seed, int n_agents, int max_segments) {
  std::vector<PiecewiseValuation> out;
  std::mt19937_64 rng(seed);
  for (int a = 0; a < n_agents; ++a) out.push_back(random_valuation(rng(), max_segments));
  return out;
}

std::vector<MarkPolicy> random_policies(std::uint64_t seed, int n_agents, PolicyMix mix) {
  std::mt19937_64 rng(seed);
  std::vector<MarkPolicy> out;
  for (int a = 0; a < n_agents; ++a) {
    switch (mix) {
      case PolicyMix::leftmost: out.push_back(MarkPolicy::leftmost()); break;
      case PolicyMix::rightmost: out.push_back(MarkPolicy::rightmost()); break;
      case PolicyMix::mixed: {
        int pick = std::uniform_int_distribution<int>(0, 2)(rng);
        if (pick == 0)
          out.push_back(MarkPolicy::leftmost());
        else if (pick == 1)
          out.push_back(MarkPolicy::rightmost());
        else
          out.push_back(MarkPolicy::offset(ratio(std::uniform_int_distribution<int>(0, 8)(rng), 8)));
      }
    }
  }
  return out;
}

namespace {

std::string describe(std::span<const PiecewiseValuation> profile, std::span<const MarkPolicy> policies) {
  std::string out;
  for (std::size_t a = 0; a < profile.size(); ++a)
    out += "  agent " + std::to_string(a + 1) + ": " + to_string(profile[a]) + " (" +
           to_string(policies[a]) + ")\n";
  return out;
}

}  // namespace

ProbeResult soundness_probe(const ExprPtr& e, int n_agents, int trials, std::uint64_t seed, PolicyMix mix,
                            IteMode mode, const TranslateOptions& opts) {
  ProbeResult r;
  FormulaPtr c = constraint_of(0, e, tm::ret(), mode, opts);
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    ++r.trials;
    auto profile = random_profile(rng(), n_agents);
    auto policies = random_policies(rng(), n_agents, mix);
    Evaluation ev;
    try {
      ev = evaluate(e, profile, policies, mode);
    } catch (const RuntimeError&) {
      ++r.skipped;
      continue;
    }
    Assignment a;
    for (const auto& m : ev.trace.marks) a[Var::y(m.var)] = Value::number(m.position);
    for (const auto& b : ev.trace.branches) a[Var::y(b.var)] = b.value;
    a[Var::ret()] = ev.value;
    bool holds = false;
    std::string why;
    try {
      holds = interpret(c, profile, a);
    } catch (const InterpretError& err) {
      why = err.what();
    }
    ++r.checked;
    if (!holds) {
      r.passed = false;
      r.failure = "constraint " + (why.empty() ? std::string("is false") : "cannot be evaluated: " + why) +
                  " for output " + to_string(ev.value) + " under\n" + describe(profile, policies);
      return r;
    }
  }
  return r;
}

PiecewiseValuation grid_valuation(std::uint64_t seed, int resolution) {
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  std::mt19937_64 rng(seed);
  std::vector<int> cells(resolution);
  int mass = 0;
  for (auto& c : cells) {
    c = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? 0 : 1;
    mass += c;
  }
  for (std::size_t i = 0; mass < 2 || mass % 2 != 0; i = (i + 1) % cells.size())
    if (cells[i] == 0) {
      cells[i] = 1;
      ++mass;
    }
  std::vector<Rational> bps{0}, ds;
  for (int i = 0; i < resolution; ++i) {
    Rational d(cells[i] * resolution, mass);
    d.canonicalize();
    if (!ds.empty() && ds.back() == d) {
      bps.back() = ratio(i + 1, resolution);
    } else {
      ds.push_back(d);
      bps.emplace_back(i + 1, resolution);
    }
    bps.back().canonicalize();
  }
  return PiecewiseValuation(std::move(bps), std::move(ds));
}

ProbeResult completeness_probe(const ExprPtr& e, int n_agents, int resolution, int profiles, std::uint64_t seed,
                               const TranslateOptions& opts) {
  ProbeResult r;
  std::vector<int> ys;
  for (const auto& [y, sort] : fresh_sorts(0, e, IteMode::core)) ys.push_back(y);
  if (ys.size() > 3) throw std::invalid_argument("completeness probe supports at most three mark queries");
  ConstraintTriple tr = translate(0, e, IteMode::core, opts);
  std::mt19937_64 rng(seed);
  for (int p = 0; p < profiles; ++p) {
    std::vector<PiecewiseValuation> profile;
    for (int a = 0; a < n_agents; ++a) profile.push_back(grid_valuation(rng(), resolution));
    std::vector<int> digits(ys.size(), 0);
    for (;;) {
      ++r.trials;
      Assignment a;
      std::map<int, Rational> script;
      for (std::size_t i = 0; i < ys.size(); ++i) {
        Rational v(digits[i], resolution);
        v.canonicalize();
        a[Var::y(ys[i])] = Value::number(v);
        script[ys[i]] = v;
      }
      bool satisfied = false;
      Value expected;
      try {
        satisfied = interpret(tr.side, profile, a);
        if (satisfied) expected = interpret(tr.result, profile, a);
      } catch (const InterpretError&) {
        satisfied = false;
        ++r.skipped;
      }
      if (satisfied) {
        ++r.checked;
        std::vector<MarkPolicy> policy{MarkPolicy::scripted(script)};
        std::string assignment;
        for (const auto& [y, v] : script) assignment += " y" + std::to_string(y) + "=" + to_string(v);
        try {
          Evaluation ev = evaluate(e, profile, policy);
          if (!(ev.value == expected)) {
            r.passed = false;
            r.failure = "replay of" + assignment + " yields " + to_string(ev.value) + ", constraint says " +
                        to_string(expected);
            return r;
          }
        } catch (const RuntimeError& err) {
          r.passed = false;
          r.failure = "replay of" + assignment + " is stuck: " + err.what();
          return r;
        }
      }
      std::size_t i = 0;
      while (i < digits.size() && ++digits[i] > resolution) digits[i++] = 0;
      if (i == digits.size()) break;
    }
  }
  return r;
}

namespace {

class ExprGen {
 public:
  ExprGen(std::mt19937_64& rng, const std::vector<std::string>& free) : rng_(rng), scope_(free) {}

  ExprPtr gen(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(14)) {
      case 0: return leaf();
      case 1: {
        std::string name = "v" + std::to_string(++counter_);
        ExprPtr bound = gen(depth - 1);
        scope_.push_back(name);
        ExprPtr body = gen(depth - 1);
        scope_.pop_back();
        if (!fv(body).contains(name)) body = ex::tuple({body, ex::var(name)});
        return ex::let(name, bound, body);
      }
      case 2: {
        static const PrimOp ops[] = {PrimOp::Eq, PrimOp::Ne, PrimOp::Le, PrimOp::Ge, PrimOp::Add, PrimOp::Sub,
                                     PrimOp::Mul, PrimOp::And, PrimOp::Or, PrimOp::Not};
        PrimOp op = ops[pick(10)];
        std::vector<ExprPtr> args;
        for (int i = 0; i < arity(op); ++i) args.push_back(gen(depth - 1));
        return ex::prim(op, args);
      }
      case 3: return ex::tuple({gen(depth - 1), gen(depth - 1)});
      case 4: return ex::proj(1 + pick(2), gen(depth - 1));
      case 5:
      case 6: return ex::cond(gen(depth - 1), gen(depth - 1), gen(depth - 1));
      case 7: return ex::left(gen(depth - 1));
      case 8: return ex::right(gen(depth - 1));
      case 9: return ex::divide(gen(depth - 1), gen(depth - 1));
      case 10:
      case 11: return ex::mark(1 + pick(3), gen(depth - 1), gen(depth - 1));
      case 12: return ex::eval(1 + pick(3), gen(depth - 1));
      default: return ex::cake();
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  ExprPtr leaf() {
    switch (pick(4)) {
      case 0: return ex::num(ratio(pick(5), 4));
      case 1: return ex::boolean(pick(2) == 0);
      case 2:
        if (!scope_.empty()) return ex::var(scope_[pick(static_cast<int>(scope_.size()))]);
        return ex::cake();
      default: return ex::cake();
    }
  }

  std::mt19937_64& rng_;
  std::vector<std::string> scope_;
  int counter_ = 0;
};

}  // namespace

ExprPtr random_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& free) {
  return ExprGen(rng, free).gen(depth);
}

}  // namespace slice::testkit
