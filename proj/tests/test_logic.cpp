#include "slice/logic.hpp"
#include "slice/testkit.hpp"
#include "slice/translate.hpp"

#include <gtest/gtest.h>

#include <random>

namespace slice::logic {
namespace {

const Rational half(1, 2);

TermPtr unit() { return tm::interval(tm::num(0), tm::num(1)); }

std::vector<PiecewiseValuation> uniform(int n) { return std::vector<PiecewiseValuation>(n, PiecewiseValuation::uniform()); }

TEST(Apply, DirectHit) {
  TermPtr r = logic::apply(tm::x("x"), Substitution::single("x", unit()));
  EXPECT_EQ(to_string(r), "[0, 1]");
}

TEST(Apply, LeavesFreshVariablesAlone) {
  Substitution s = Substitution::single("x", unit()).prepend("z", tm::y(4));
  EXPECT_EQ(to_string(logic::apply(tm::y(1), s)), "y1");
}

TEST(Apply, SequentialLeftToRight) {
  // {t/x2}{u/x1} with fv(t) = {x1}: nu_1(x2) becomes nu_1(t{u/x1}).
  TermPtr t = tm::interval(tm::x("x1"), tm::num(1));
  TermPtr u = tm::num(half);
  Substitution s = Substitution::single("x1", u).prepend("x2", t);
  ASSERT_EQ(s.steps().size(), 2u);
  EXPECT_EQ(s.steps()[0].first, "x2");
  EXPECT_TRUE(s.well_formed());
  TermPtr r = logic::apply(tm::nu(1, tm::x("x2")), s);
  EXPECT_EQ(to_string(r), "nu_1([1/2, 1])");
  EXPECT_TRUE(free_xs(r).empty());
}

TEST(Substitution, Bookkeeping) {
  Substitution s = Substitution::single("a", tm::y(3)).prepend("b", tm::op(PrimOp::Add, {tm::x("a"), tm::y(7)}));
  EXPECT_EQ(s.domain(), (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(s.max_y(), 7);
  EXPECT_TRUE(s.well_formed());
  EXPECT_EQ(Substitution().max_y(), 0);
  // Shared fresh variable between replacement terms.
  EXPECT_FALSE(Substitution::single("a", tm::y(3)).prepend("b", tm::y(3)).well_formed());
  // Mentions a program variable nothing later eliminates.
  EXPECT_FALSE(Substitution::single("a", tm::x("c")).well_formed());
}

TEST(Replace, QuantifiersShadow) {
  FormulaPtr f = fm::conj(fm::eq(tm::y(1), tm::num(0)),
                          fm::exists({{Var::y(1), Ty::pos()}}, fm::eq(tm::y(1), tm::num(1))));
  FormulaPtr g = replace(f, {{Var::y(1), tm::num(half)}});
  EXPECT_EQ(to_string(g), "(1/2 = 0 and exists y1:E. y1 = 1)");
  EXPECT_EQ(free_ys(g), std::set<int>{});
}

TEST(Interpret, Examples) {
  Assignment none;
  EXPECT_TRUE(interpret(fm::eq(tm::nu(1, unit()), tm::num(1)), uniform(1), none));
  Assignment a{{Var::y(1), Value::number(half)}};
  EXPECT_TRUE(interpret(fm::eq(tm::interval(tm::num(0), tm::y(1)), tm::constant(Value::interval(0, half))),
                        uniform(1), a));
  EXPECT_FALSE(interpret(fm::ge(tm::num(0), tm::y(1)), uniform(1), a));
}

TEST(Interpret, Operators) {
  Assignment a{{Var::y(1), Value::number(half)}, {Var::ret(), Value::tuple({Value::number(1), Value::boolean(true)})}};
  auto val = [&](const TermPtr& t) { return interpret(t, uniform(2), a); };
  EXPECT_EQ(val(tm::proj(1, tm::ret())), Value::number(1));
  EXPECT_EQ(val(tm::ite(tm::proj(2, tm::ret()), tm::y(1), tm::num(0))), Value::number(half));
  EXPECT_EQ(val(tm::left(tm::interval(tm::y(1), tm::num(1)))), Value::number(half));
  EXPECT_EQ(val(tm::right(tm::interval(tm::y(1), tm::num(1)))), Value::number(1));
  EXPECT_EQ(val(tm::nu(2, tm::interval(tm::num(0), tm::y(1)))), Value::number(half));
  EXPECT_EQ(val(tm::sum({tm::y(1), tm::y(1), tm::num(1)})), Value::number(2));
  EXPECT_TRUE(interpret(fm::implies(fm::bottom(), fm::eq(tm::y(9), tm::num(0))), uniform(1), a));
  EXPECT_TRUE(interpret(fm::disj(fm::top(), fm::eq(tm::y(9), tm::num(0))), uniform(1), a));
}

TEST(Interpret, Errors) {
  EXPECT_THROW(interpret(fm::eq(tm::y(2), tm::num(0)), uniform(1), {}), InterpretError);
  EXPECT_THROW(interpret(fm::exists({{Var::y(1), Ty::pos()}}, fm::top()), uniform(1), {}), InterpretError);
  Assignment bad{{Var::y(1), Value::number(2)}};
  EXPECT_THROW(interpret(tm::interval(tm::num(0), tm::y(1)), uniform(1), bad), InterpretError);
  EXPECT_THROW(interpret(tm::nu(2, unit()), uniform(1), {}), InterpretError);
}

TEST(Interpret, EqualityIsReflexive) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = testkit::random_expr(rng, 3, {});
    ConstraintTriple t = translate(0, e);
    Assignment a;
    for (int y = 1; y <= t.next; ++y) a[Var::y(y)] = Value::number(ratio(y % 3, 2 + y % 2));
    auto profile = testkit::random_profile(i, 3);
    try {
      EXPECT_TRUE(interpret(fm::eq(t.result, t.result), profile, a)) << to_string(t.result);
    } catch (const InterpretError&) {
      // Ill-formed intervals or ill-sorted operators have no meaning.
    }
  }
}

// Random substitutions respecting the invariants eliminate every program
// variable of a formula whose program variables lie in the domain.
TEST(Apply, EliminatesDomainVariables) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> names = {"u", "v", "w"};
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = testkit::random_expr(rng, 3, names);
    FormulaPtr phi = constraint_of(0, e, tm::ret());
    // Build {t3/w}{t2/v}{t1/u}, where t_i may mention the variables substituted after it.
    int next_y = 100;
    Substitution s;
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::vector<TermPtr> parts{tm::y(++next_y)};
      for (std::size_t j = 0; j < k; ++j)
        if (rng() % 2) parts.push_back(tm::x(names[j]));
      s = s.prepend(names[k], parts.size() == 1 ? parts[0] : tm::tuple(parts));
    }
    ASSERT_TRUE(s.well_formed());
    EXPECT_TRUE(free_xs(logic::apply(phi, s)).empty()) << to_string(e);
  }
}

TEST(FreeVars, Collected) {
  FormulaPtr f = fm::forall({{Var::ret(), Ty::pos()}},
                            fm::conj(fm::ge(tm::ret(), tm::y(2)), fm::eq(tm::x("a"), tm::nu(1, tm::x("b")))));
  EXPECT_EQ(free_ys(f), std::set<int>{2});
  EXPECT_EQ(free_xs(f), (std::set<std::string>{"a", "b"}));
  EXPECT_FALSE(free_vars(f).contains(Var::ret()));
}

TEST(Sorts, OfTerms) {
  std::map<Var, Ty> ctx{{Var::y(1), Ty::pos()}};
  EXPECT_EQ(sort_of(tm::interval(tm::num(0), tm::y(1)), ctx), Ty::interval());
  EXPECT_EQ(sort_of(tm::nu(1, unit()), ctx), Ty::real());
  EXPECT_EQ(sort_of(tm::tuple({unit(), tm::y(1)}), ctx), Ty::product({Ty::interval(), Ty::pos()}));
  EXPECT_THROW(sort_of(tm::y(2), ctx), std::invalid_argument);
}

TEST(DagSize, CountsSharedNodesOnce) {
  TermPtr t = tm::nu(1, unit());
  FormulaPtr f = fm::conj(fm::eq(t, t), fm::ge(t, t));
  EXPECT_EQ(dag_size(f), dag_size(fm::conj(fm::eq(t, t), fm::ge(t, t))));
  // conj, eq, ge, nu, interval, 0, 1
  EXPECT_EQ(dag_size(f), 7u);
}

}  // namespace
}  // namespace slice::logic
