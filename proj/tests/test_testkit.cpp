#include "slice/interp.hpp"
#include "slice/testkit.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace slice::testkit {
namespace {

using test::corpus_expr;

const Rational half(1, 2);

Value iv(Rational lo, Rational hi) { return Value::interval(std::move(lo), std::move(hi)); }

TEST(EnvyCheck, EmptyPiecesAreEnvyFree) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  EnvyReport r = envy_check(Value::tuple({iv(0, 0), iv(1, 1)}), profile);
  EXPECT_TRUE(r.envy_free);
  EXPECT_EQ(r.matrix.values, (std::vector<std::vector<Rational>>{{0, 0}, {0, 0}}));
}

TEST(EnvyCheck, CutChooseOnUniform) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  std::vector<MarkPolicy> policy{MarkPolicy::leftmost()};
  Value out = evaluate(test::corpus_program("cut_choose"), profile, policy).value;
  EnvyReport r = envy_check(out, profile);
  EXPECT_TRUE(r.envy_free);
  EXPECT_EQ(r.matrix.values, (std::vector<std::vector<Rational>>{{half, half}, {half, half}}));
}

TEST(EnvyCheck, WholeCakeToOneAgentIsEnvied) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  EnvyReport r = envy_check(Value::tuple({iv(0, 1), iv(0, 0)}), profile);
  EXPECT_FALSE(r.envy_free);
  EXPECT_EQ(r.matrix.values[1][0], 1);
}

TEST(EnvyCheck, MultiPieceAllocations) {
  std::vector<PiecewiseValuation> profile(2, PiecewiseValuation::uniform());
  Value a = Value::tuple({iv(0, ratio(1, 4)), iv(ratio(3, 4), 1)});
  Value b = Value::tuple({iv(ratio(1, 4), ratio(3, 4)), iv(1, 1)});
  EnvyReport r = envy_check(Value::tuple({a, b}), profile);
  EXPECT_TRUE(r.envy_free);
  EXPECT_EQ(r.matrix.values[0][0], half);
}

TEST(EnvyCheck, SingleAgentAndArityMismatch) {
  std::vector<PiecewiseValuation> one{PiecewiseValuation::uniform()};
  EXPECT_TRUE(envy_check(iv(0, 1), one).envy_free);
  std::vector<PiecewiseValuation> three(3, PiecewiseValuation::uniform());
  EXPECT_THROW(envy_check(Value::tuple({iv(0, 1), iv(0, 0)}), three), std::invalid_argument);
}

// Doubling every density on half the cake and halving it elsewhere keeps
// the verdict for pieces aligned with the breakpoints.
TEST(EnvyCheck, VerdictIndependentOfAlignedRescaling) {
  std::vector<PiecewiseValuation> a{PiecewiseValuation::uniform(), PiecewiseValuation::uniform()};
  std::vector<PiecewiseValuation> b{PiecewiseValuation({0, half, 1}, {ratio(3, 2), half}),
                                    PiecewiseValuation({0, half, 1}, {ratio(3, 2), half})};
  Value alloc = Value::tuple({iv(0, half), iv(half, 1)});
  EXPECT_TRUE(envy_check(alloc, a).envy_free);
  EXPECT_FALSE(envy_check(alloc, b).envy_free);
  Value fair = Value::tuple({iv(0, ratio(1, 3)), iv(ratio(1, 3), 1)});
  EXPECT_TRUE(envy_check(fair, b).envy_free);
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(random_profile(4, 3), random_profile(4, 3));
  EXPECT_NE(random_profile(4, 3), random_profile(5, 3));
  EXPECT_EQ(grid_valuation(9, 8), grid_valuation(9, 8));
  std::mt19937_64 a(1), b(1);
  EXPECT_EQ(to_string(random_expr(a, 4, {"u"})), to_string(random_expr(b, 4, {"u"})));
}

TEST(Generators, GridValuationsLiveOnTheGrid) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    PiecewiseValuation v = grid_valuation(s, 8);
    EXPECT_EQ(v.value_of(0, 1), 1);
    for (const auto& b : v.breakpoints()) EXPECT_EQ(Rational(b * 8).get_den(), 1);
  }
}

TEST(Generators, LetBindersAreUsed) {
  std::mt19937_64 rng(2);
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    if (e->kind == ExprKind::Let) EXPECT_TRUE(fv(e->kids[1]).contains(e->name)) << to_string(e);
    for (const auto& k : e->kids) walk(k);
  };
  for (int i = 0; i < 500; ++i) walk(random_expr(rng, 4, {}));
}

TEST(Soundness, CutChoose) {
  for (auto mix : {PolicyMix::leftmost, PolicyMix::rightmost, PolicyMix::mixed})
    for (IteMode mode : {IteMode::core, IteMode::impl}) {
      ProbeResult r = soundness_probe(corpus_expr("cut_choose"), 2, 50, 1, mix, mode);
      EXPECT_TRUE(r.passed) << r.failure;
      EXPECT_EQ(r.checked + r.skipped, r.trials);
      EXPECT_EQ(r.skipped, 0);
    }
}

TEST(Soundness, CorpusWithMixedPolicies) {
  for (const auto& name : test::kCorpus) {
    Program p = test::corpus_program(name);
    ProbeResult r = soundness_probe(desugar(p), p.agent_count, 30, 7, PolicyMix::mixed, IteMode::impl);
    EXPECT_TRUE(r.passed) << name << ": " << r.failure;
    EXPECT_GT(r.checked, 0);
  }
}

TEST(Completeness, CutChooseAndSurplus) {
  for (const char* name : {"cut_choose", "surplus"}) {
    ProbeResult r = completeness_probe(corpus_expr(name), 2, 8, 5, 3);
    EXPECT_TRUE(r.passed) << name << ": " << r.failure;
    EXPECT_GT(r.checked, 0) << name;
  }
}

// A translation that forgets the value a mark must cut still admits every
// run, but its side condition also admits cuts no agent would make.
TEST(Probes, DroppedMarkEquationIsCaught) {
  TranslateOptions broken;
  broken.drop_mark_equality = true;
  ExprPtr e = corpus_expr("cut_choose");
  EXPECT_TRUE(soundness_probe(e, 2, 50, 1, PolicyMix::mixed, IteMode::core, broken).passed);
  ProbeResult r = completeness_probe(e, 2, 8, 3, 3, broken);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.failure.empty());
}

// On the worked example, (1/2, 1/4) is the only grid assignment of the two
// marks satisfying the side condition.
TEST(Completeness, SurplusExampleHasOneSolution) {
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform(), PiecewiseValuation({0, half, 1}, {2, 0})};
  ExprPtr e = corpus_expr("surplus");
  ConstraintTriple t = translate(0, e);
  ASSERT_EQ(t.next, 2);
  int solutions = 0;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      logic::Assignment a{{logic::Var::y(1), Value::number(ratio(i, 16))},
                          {logic::Var::y(2), Value::number(ratio(j, 16))}};
      try {
        if (logic::interpret(t.side, profile, a)) {
          ++solutions;
          EXPECT_EQ(i, 8);
          EXPECT_EQ(j, 4);
        }
      } catch (const logic::InterpretError&) {
      }
    }
  EXPECT_EQ(solutions, 1);
}

}  // namespace
}  // namespace slice::testkit
