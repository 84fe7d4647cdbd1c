#include "slice/interp.hpp"
#include "slice/testkit.hpp"
#include "slice/typecheck.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace slice {
namespace {

using test::corpus_expr;
using test::corpus_program;
using test::kCorpus;
using test::parse_expr;

const Ty I = Ty::interval();

bool inhabits(const Value& v, const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Bool: return v.is_boolean();
    case Ty::Kind::Real: return v.is_number();
    case Ty::Kind::Nat: return v.is_number() && is_integer(v.as_number()) && v.as_number() >= 0;
    case Ty::Kind::Pos: return v.is_number() && v.as_number() >= 0 && v.as_number() <= 1;
    case Ty::Kind::Interval: return v.is_interval();
    case Ty::Kind::Product: {
      if (!v.is_tuple() || v.as_tuple().size() != t.elems().size()) return false;
      for (std::size_t i = 0; i < t.elems().size(); ++i)
        if (!inhabits(v.as_tuple()[i], t.elems()[i])) return false;
      return true;
    }
  }
  return false;
}

TEST(Infer, CutChooseIsAPairOfPieces) { EXPECT_EQ(infer(corpus_expr("cut_choose")), Ty::product({I, I})); }

TEST(Infer, SelfridgeConwayGivesTwoPiecesEach) {
  Ty pair = Ty::product({I, I});
  EXPECT_EQ(infer(corpus_expr("selfridge_conway")), Ty::product({pair, pair, pair}));
}

TEST(Infer, GuardMustBeBoolean) {
  EXPECT_THROW(infer(ex::cond(ex::cake(), ex::num(1), ex::num(2))), TypeError);
}

TEST(Infer, ProjectionOutOfRange) {
  EXPECT_THROW(infer(ex::proj(3, ex::tuple({ex::cake(), ex::cake()}))), TypeError);
  EXPECT_THROW(infer(ex::proj(1, ex::cake())), TypeError);
}

TEST(Infer, UnboundVariable) {
  try {
    infer(ex::var("x", {3, 4}));
    FAIL();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.loc().line, 3);
    EXPECT_EQ(e.loc().column, 4);
  }
}

TEST(Infer, QueryTypes) {
  auto half = ex::num(ratio(1, 2));
  EXPECT_EQ(infer(ex::mark(1, ex::num(0), half)), Ty::pos());
  EXPECT_EQ(infer(ex::eval(1, ex::cake())), Ty::real());
  EXPECT_EQ(infer(ex::divide(ex::cake(), half)), Ty::product({I, I}));
  EXPECT_EQ(infer(ex::left(ex::cake())), Ty::pos());
  EXPECT_EQ(infer(ex::right(ex::cake())), Ty::pos());
  EXPECT_EQ(infer(ex::cake()), I);
  // Targets are reals; a valuation need not lie in [0,1] syntactically.
  EXPECT_EQ(infer(ex::mark(1, ex::num(0), ex::prim(PrimOp::Mul, {ex::num(2), ex::eval(1, ex::cake())}))), Ty::pos());
}

TEST(Infer, QueryArgumentsAreChecked) {
  EXPECT_THROW(infer(ex::mark(1, ex::num(2), ex::num(0))), TypeError);
  EXPECT_THROW(infer(ex::mark(1, ex::cake(), ex::num(0))), TypeError);
  EXPECT_THROW(infer(ex::eval(1, ex::num(0))), TypeError);
  EXPECT_THROW(infer(ex::divide(ex::num(0), ex::num(0))), TypeError);
  EXPECT_THROW(infer(ex::left(ex::num(0))), TypeError);
}

TEST(Infer, PositionsCoerceToReals) {
  auto m = ex::mark(1, ex::num(0), ex::num(ratio(1, 2)));
  EXPECT_EQ(infer(ex::prim(PrimOp::Ge, {m, ex::num(3)})), Ty::boolean());
  EXPECT_EQ(infer(ex::prim(PrimOp::Add, {m, m})), Ty::real());
  EXPECT_EQ(infer(ex::cond(ex::boolean(true), m, ex::num(5))), Ty::real());
  EXPECT_EQ(literal_type(Value::number(ratio(1, 3))), Ty::pos());
  EXPECT_EQ(literal_type(Value::number(3)), Ty::nat());
  EXPECT_EQ(literal_type(Value::number(ratio(-1, 3))), Ty::real());
  EXPECT_EQ(literal_type(Value::number(ratio(4, 3))), Ty::real());
}

TEST(Infer, DivisionOnlyByNonZeroLiterals) {
  auto v = ex::eval(1, ex::cake());
  EXPECT_EQ(infer(ex::prim(PrimOp::Div, {v, ex::num(3)})), Ty::real());
  EXPECT_THROW(infer(ex::prim(PrimOp::Div, {v, ex::num(0)})), TypeError);
  EXPECT_THROW(infer(ex::prim(PrimOp::Div, {v, v})), TypeError);
}

TEST(Infer, IntervalsCompareForEquality) {
  EXPECT_EQ(infer(ex::prim(PrimOp::Ne, {ex::cake(), ex::cake()})), Ty::boolean());
  EXPECT_THROW(infer(ex::prim(PrimOp::Ge, {ex::cake(), ex::cake()})), TypeError);
  EXPECT_THROW(infer(ex::prim(PrimOp::Eq, {ex::cake(), ex::num(0)})), TypeError);
}

TEST(Infer, BranchesMustAgree) {
  EXPECT_THROW(infer(ex::cond(ex::boolean(true), ex::cake(), ex::num(0))), TypeError);
  EXPECT_THROW(infer(parse_expr("agents 2\nif true then (cake, cake) else ((cake, cake), (cake, cake))")), TypeError);
}

TEST(Infer, LetShadowing) {
  auto e = ex::let("x", ex::cake(), ex::let("x", ex::num(1), ex::prim(PrimOp::Add, {ex::var("x"), ex::num(1)})));
  EXPECT_EQ(infer(e), Ty::real());
  TyCtx ctx;
  ctx.push("x", Ty::boolean());
  ctx.push("x", I);
  EXPECT_EQ(*ctx.lookup("x"), I);
}

TEST(Infer, JoinIsTheLeastUpperBound) {
  EXPECT_EQ(join(Ty::pos(), Ty::nat()), Ty::real());
  EXPECT_EQ(join(Ty::pos(), Ty::pos()), Ty::pos());
  EXPECT_EQ(join(Ty::product({Ty::pos(), I}), Ty::product({Ty::real(), I})), Ty::product({Ty::real(), I}));
  EXPECT_FALSE(join(I, Ty::real()).has_value());
}

// Preservation, sampled: outputs of corpus runs inhabit the inferred type,
// and well-typed closed programs get stuck only with the two runtime errors.
TEST(Infer, PreservationOnCorpusRuns) {
  for (const auto& name : kCorpus) {
    Program p = corpus_program(name);
    ExprPtr e = desugar(p);
    Ty t = infer(e);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto profile = testkit::random_profile(seed, p.agent_count);
      auto policies = testkit::random_policies(seed, p.agent_count, testkit::PolicyMix::mixed);
      try {
        Value v = evaluate(e, profile, policies).value;
        EXPECT_TRUE(inhabits(v, t)) << name << " seed " << seed << ": " << to_string(v);
      } catch (const RuntimeError&) {
        // Getting stuck at a query is the one other outcome preservation allows.
      }
    }
  }
}

TEST(Infer, RandomWellTypedTermsGetStuckOnlyAtQueries) {
  std::mt19937_64 rng(7);
  int typed = 0;
  for (int i = 0; i < 3000; ++i) {
    ExprPtr e = testkit::random_expr(rng, 4, {});
    Ty t;
    try {
      t = infer(e);
    } catch (const TypeError&) {
      continue;
    }
    ++typed;
    auto profile = testkit::random_profile(i, 3);
    std::vector<MarkPolicy> policy{MarkPolicy::leftmost()};
    try {
      Value v = evaluate(e, profile, policy).value;
      EXPECT_TRUE(inhabits(v, t)) << to_string(e) << " gave " << to_string(v);
    } catch (const RuntimeError&) {
    }
  }
  EXPECT_GT(typed, 100);
}

}  // namespace
}  // namespace slice
