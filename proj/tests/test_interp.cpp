#include "slice/interp.hpp"
#include "slice/testkit.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace slice {
namespace {

using test::corpus_expr;
using test::corpus_program;
using test::kCorpus;

const Rational half(1, 2), quarter(1, 4);

Value iv(Rational lo, Rational hi) { return Value::interval(std::move(lo), std::move(hi)); }

std::vector<MarkPolicy> leftmost() { return {MarkPolicy::leftmost()}; }

void collect_intervals(const Value& v, std::vector<Interval>& out) {
  if (v.is_interval())
    out.push_back(v.as_interval());
  else if (v.is_tuple())
    for (const auto& c : v.as_tuple()) collect_intervals(c, out);
}

// Selfridge-Conway gets stuck when the agent cutting Rest values it at zero
// and marks past its right end; every other corpus protocol always finishes.
bool run_or_stuck(const std::string& name, const ExprPtr& e, const std::vector<PiecewiseValuation>& profile,
                  const std::vector<MarkPolicy>& policies, Value& out) {
  try {
    out = evaluate(e, profile, policies).value;
    return true;
  } catch (const RuntimeError& err) {
    EXPECT_EQ(name, "selfridge_conway") << err.what();
    EXPECT_EQ(err.kind(), RuntimeError::Kind::DivOutOfBounds);
    return false;
  }
}

TEST(Evaluate, CutChooseUniform) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  Evaluation ev = evaluate(corpus_program("cut_choose"), profile, leftmost());
  EXPECT_EQ(ev.value, Value::tuple({iv(half, 1), iv(0, half)}));
  EXPECT_EQ(ev.trace.positions(), (std::vector<Rational>{half}));
}

TEST(Evaluate, SurplusExample) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform(), PiecewiseValuation({0, half, 1}, {2, 0})};
  Evaluation ev = evaluate(corpus_program("surplus"), profile, leftmost());
  EXPECT_EQ(ev.value, Value::tuple({iv(half, 1), iv(0, quarter)}));
  EXPECT_EQ(ev.trace.positions(), (std::vector<Rational>{half, quarter}));
}

TEST(Evaluate, CuttingPastTheCake) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform()};
  try {
    evaluate(parse("agents 1\ndivide(cake, 2)"), profile, leftmost());
    FAIL();
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.kind(), RuntimeError::Kind::DivOutOfBounds);
    EXPECT_EQ(e.loc().line, 2);
  }
}

TEST(Evaluate, InfeasibleMark) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform()};
  try {
    evaluate(parse("agents 1\nmark_1(1/2, 3/4)"), profile, leftmost());
    FAIL();
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.kind(), RuntimeError::Kind::MarkInfeasible);
  }
}

TEST(Evaluate, ProfileMustMatchAgentCount) {
  std::vector<PiecewiseValuation> one{PiecewiseValuation::uniform()};
  EXPECT_THROW(evaluate(corpus_program("cut_choose"), one, leftmost()), std::invalid_argument);
  std::vector<PiecewiseValuation> two(2, PiecewiseValuation::uniform());
  std::vector<MarkPolicy> three(3, MarkPolicy::leftmost());
  EXPECT_THROW(evaluate(corpus_program("cut_choose"), two, three), std::invalid_argument);
}

TEST(Evaluate, EveryRule) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation({0, half, 1}, {2, 0})};
  auto run = [&](const std::string& text) { return evaluate(parse("agents 1\n" + text), profile, leftmost()).value; };
  EXPECT_EQ(run("1/2 + 1/3 * 3"), Value::number(ratio(3, 2)));
  EXPECT_EQ(run("not (1 = 2) and (true or false)"), Value::boolean(true));
  EXPECT_EQ(run("piece((1, 2, 3), 3)"), Value::number(3));
  EXPECT_EQ(run("let x = 1 in let x = x + 1 in x"), Value::number(2));
  EXPECT_EQ(run("if 1 <= 0 then cake else divide(cake, 1/4)"), Value::tuple({iv(0, quarter), iv(quarter, 1)}));
  EXPECT_EQ(run("(left piece(divide(cake, 1/4), 2), right cake)"),
            Value::tuple({Value::number(quarter), Value::number(1)}));
  EXPECT_EQ(run("eval_1(piece(divide(cake, 1/4), 2))"), Value::number(half));
  EXPECT_EQ(run("mark_1(1/4, 1/2)"), Value::number(half));
  EXPECT_EQ(run("eval_1(cake) / 2"), Value::number(half));
}

TEST(Evaluate, TraceFollowsEvaluationOrder) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  // Guard before branch, bound expression before body, left before right.
  Evaluation ev = evaluate(parse("agents 2\nlet a = mark_1(0, 1/4) in "
                                 "if mark_2(0, 1/2) >= a then (mark_1(0, 3/4), mark_2(0, 1/8)) else (0, 0)"),
                           profile, leftmost());
  EXPECT_EQ(ev.trace.positions(), (std::vector<Rational>{quarter, half, ratio(3, 4), ratio(1, 8)}));
  std::vector<int> vars;
  for (const auto& m : ev.trace.marks) vars.push_back(m.var);
  EXPECT_EQ(vars, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(ev.trace.marks[1].agent.index, 2);
}

TEST(Evaluate, TraceIndicesSkipUntakenBranches) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform()};
  Evaluation ev =
      evaluate(parse("agents 1\nif false then mark_1(0, 1/4) else (let z = mark_1(0, 1/2) in z)"), profile, leftmost());
  ASSERT_EQ(ev.trace.marks.size(), 1u);
  EXPECT_EQ(ev.trace.marks[0].var, 2);
  Evaluation impl = evaluate(parse("agents 1\nif false then mark_1(0, 1/4) else mark_1(0, 1/2)"), profile, leftmost(),
                             IteMode::impl);
  ASSERT_EQ(impl.trace.branches.size(), 1u);
  EXPECT_EQ(impl.trace.branches[0].var, 3);
  EXPECT_EQ(impl.trace.branches[0].value, Value::number(half));
}

TEST(Evaluate, DeterministicGivenPolicies) {
  for (const auto& name : kCorpus) {
    Program p = corpus_program(name);
    auto profile = testkit::random_profile(11, p.agent_count);
    auto policies = testkit::random_policies(11, p.agent_count, testkit::PolicyMix::mixed);
    Evaluation a = evaluate(p, profile, policies), b = evaluate(p, profile, policies);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.trace.positions(), b.trace.positions());
  }
}

TEST(Evaluate, CorpusAllocationsHaveDisjointInteriors) {
  for (const auto& name : kCorpus) {
    Program p = corpus_program(name);
    ExprPtr e = desugar(p);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto profile = testkit::random_profile(seed, p.agent_count);
      for (auto mix : {testkit::PolicyMix::leftmost, testkit::PolicyMix::rightmost}) {
        auto policies = testkit::random_policies(seed, p.agent_count, mix);
        std::vector<Interval> pieces;
        Value out;
        if (!run_or_stuck(name, e, profile, policies, out)) continue;
        collect_intervals(out, pieces);
        for (std::size_t i = 0; i < pieces.size(); ++i)
          for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            const auto &a = pieces[i], &b = pieces[j];
            bool overlap = std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
            ASSERT_FALSE(overlap) << name << " seed " << seed;
          }
      }
    }
  }
}

TEST(Evaluate, CorpusRunsAreEnvyFree) {
  for (const auto& name : kCorpus) {
    Program p = corpus_program(name);
    ExprPtr e = desugar(p);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto profile = testkit::random_profile(seed + 1000, p.agent_count);
      for (auto mix : {testkit::PolicyMix::leftmost, testkit::PolicyMix::rightmost}) {
        auto policies = testkit::random_policies(seed, p.agent_count, mix);
        Value out;
        if (!run_or_stuck(name, e, profile, policies, out)) continue;
        ASSERT_TRUE(testkit::envy_check(out, profile).envy_free) << name << " seed " << seed;
      }
    }
  }
}

TEST(Evaluate, NonDeterminismIsObservable) {
  // Agent 1 is indifferent on [1/4, 3/4], so any mark there halves its value.
  PiecewiseValuation gap({0, quarter, ratio(3, 4), 1}, {2, 0, 2});
  std::vector<PiecewiseValuation> profile{gap, PiecewiseValuation::uniform()};
  Program p = corpus_program("cut_choose");
  std::vector<MarkPolicy> right{MarkPolicy::rightmost()};
  Value a = evaluate(p, profile, leftmost()).value;
  Value b = evaluate(p, profile, right).value;
  EXPECT_NE(a, b);
  EXPECT_EQ(a, Value::tuple({iv(0, quarter), iv(quarter, 1)}));
  EXPECT_EQ(b, Value::tuple({iv(ratio(3, 4), 1), iv(0, ratio(3, 4))}));
}

// Agent 3 has no value for [0, 1/2]. Agent 2 trims [0, 1/3] at 1/6, agent 3
// prefers [2/3, 1], so agent 3 cuts Rest = [1/6, 1/3], which it values at
// zero. A rightmost mark for target 0 lands at 1/2, outside Rest.
TEST(Evaluate, SelfridgeConwayStuckOnWorthlessRest) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform(),
                                          PiecewiseValuation({0, ratio(1, 3), 1}, {ratio(3, 2), ratio(3, 4)}),
                                          PiecewiseValuation({0, half, 1}, {0, 2})};
  Program p = corpus_program("selfridge_conway");
  std::vector<MarkPolicy> rightmost{MarkPolicy::leftmost(), MarkPolicy::leftmost(), MarkPolicy::rightmost()};
  try {
    evaluate(p, profile, rightmost);
    FAIL() << "expected to get stuck";
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.kind(), RuntimeError::Kind::DivOutOfBounds);
    EXPECT_EQ(e.loc().line, 8);
  }
  std::vector<MarkPolicy> leftmost(3, MarkPolicy::leftmost());
  Value out = evaluate(p, profile, leftmost).value;
  EXPECT_TRUE(testkit::envy_check(out, profile).envy_free);
}

}  // namespace
}  // namespace slice
