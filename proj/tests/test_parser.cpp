#include "slice/interp.hpp"
#include "slice/parser.hpp"
#include "slice/testkit.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace slice {
namespace {

using test::corpus_expr;
using test::corpus_path;
using test::corpus_program;
using test::kCorpus;

ParseError::Kind error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError::Kind::Syntax;
}

int count_kind(const ExprPtr& e, ExprKind k) {
  int n = e->kind == k ? 1 : 0;
  for (const auto& kid : e->kids) n += count_kind(kid, k);
  return n;
}

TEST(Parse, CutChooseHasNoDefinitions) {
  Program p = corpus_program("cut_choose");
  EXPECT_EQ(p.agent_count, 2);
  EXPECT_TRUE(p.defs.empty());
}

TEST(Parse, SelfridgeConwayDefinesAllocRest) {
  Program p = corpus_program("selfridge_conway");
  ASSERT_EQ(p.defs.size(), 1u);
  EXPECT_EQ(p.defs[0].name, "allocRest");
  EXPECT_EQ(p.defs[0].agent_param, (std::vector<bool>{true, true, false}));
}

TEST(Parse, MinimalProtocol) {
  EXPECT_NO_THROW(parse("agents 2\nlet (A,B) = divide(cake, mark_1(0, 1/2)) in alloc(B, A)"));
}

TEST(Parse, AllocArityMustMatchAgents) {
  try {
    parse("agents 2\nalloc(cake)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Arity);
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 1);
  }
}

TEST(Parse, SyntaxErrorsCarryLocation) {
  try {
    parse("agents 2\nlet x = in x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 9);
  }
}

TEST(Parse, ErrorKinds) {
  EXPECT_EQ(error_kind("agents 1\nlet x = cake in y"), ParseError::Kind::UnknownIdentifier);
  EXPECT_EQ(error_kind("agents 1\nfoo(cake)"), ParseError::Kind::UnknownIdentifier);
  EXPECT_EQ(error_kind("agents 1\ndef f(a, b) = a;\nf(cake)"), ParseError::Kind::Arity);
  EXPECT_EQ(error_kind("agents 2\nmark_3(0, 1/2)"), ParseError::Kind::UnknownIdentifier);
  EXPECT_EQ(error_kind("agents 1\ndef f(x) = x;\ndef f(y) = y;\ncake"), ParseError::Kind::Syntax);
  EXPECT_EQ(error_kind("agents 1\ncake cake"), ParseError::Kind::Syntax);
  EXPECT_EQ(error_kind("cake"), ParseError::Kind::Syntax);
  EXPECT_EQ(error_kind("agents 1\n1 < 2"), ParseError::Kind::Syntax);
}

TEST(Parse, DefinitionsMayOnlyUseEarlierDefinitions) {
  EXPECT_EQ(error_kind("agents 1\ndef f(x) = g(x);\ndef g(x) = x;\nf(cake)"), ParseError::Kind::UnknownIdentifier);
  EXPECT_NO_THROW(parse("agents 1\ndef g(x) = x;\ndef f(x) = g(x);\nf(cake)"));
}

TEST(Parse, CommentsAndUnicodeOperators) {
  Program p = parse("# header\nagents 2 // two agents\nif 1/2 \xE2\x89\xA5 1/3 then alloc(cake, cake) else alloc(cake, cake)");
  EXPECT_EQ(count_program_lines("# header\n\nagents 2\n  // c\ncake\n"), 2);
  EXPECT_EQ(desugar(p)->kids[0]->op, PrimOp::Ge);
}

TEST(Parse, PrettyPrintIsAFixpointOnCorpus) {
  for (const auto& name : kCorpus) {
    std::string once = to_string(corpus_program(name));
    std::string twice = to_string(parse(once));
    EXPECT_EQ(once, twice) << name;
    EXPECT_EQ(to_string(desugar(parse(once))), to_string(corpus_expr(name))) << name;
  }
}

TEST(Desugar, TupleLetBindsTheIntermediateFirst) {
  ExprPtr e = desugar(parse("agents 2\nlet (A, B) = divide(cake, 1/2) in (A, B)"));
  ASSERT_EQ(e->kind, ExprKind::Let);
  const std::string h = e->name;
  EXPECT_EQ(e->kids[0]->kind, ExprKind::Divide);
  const ExprPtr& a = e->kids[1];
  ASSERT_EQ(a->kind, ExprKind::Let);
  EXPECT_EQ(a->name, "A");
  EXPECT_EQ(a->kids[0]->kind, ExprKind::Proj);
  EXPECT_EQ(a->kids[0]->index, 1);
  EXPECT_EQ(a->kids[0]->kids[0]->name, h);
  const ExprPtr& b = a->kids[1];
  ASSERT_EQ(b->kind, ExprKind::Let);
  EXPECT_EQ(b->kids[0]->index, 2);
  EXPECT_EQ(b->kids[0]->kids[0]->name, h);
  EXPECT_EQ(b->kids[1]->kind, ExprKind::Tuple);
  EXPECT_TRUE(fv(e).empty());
}

TEST(Desugar, SortTwoComparesWithGe) {
  ExprPtr e = desugar(parse("agents 2\nlet (I1, I2) = divide(cake, 1/2) in sort_2(I1, I2)"));
  std::function<const Expr*(const ExprPtr&)> find_if = [&](const ExprPtr& x) -> const Expr* {
    if (x->kind == ExprKind::If) return x.get();
    for (const auto& k : x->kids)
      if (auto* f = find_if(k)) return f;
    return nullptr;
  };
  const Expr* cond = find_if(e);
  ASSERT_NE(cond, nullptr);
  const ExprPtr& guard = cond->kids[0];
  ASSERT_EQ(guard->kind, ExprKind::Prim);
  EXPECT_EQ(guard->op, PrimOp::Ge);
  EXPECT_EQ(guard->kids[0]->kind, ExprKind::Eval);
  EXPECT_EQ(guard->kids[0]->agent.index, 2);
  EXPECT_EQ(guard->kids[0]->kids[0]->name, "I1");
  EXPECT_EQ(guard->kids[1]->kids[0]->name, "I2");
  EXPECT_EQ(count_kind(e, ExprKind::If), 1);
}

// Oracle: std::stable_sort of the pieces by descending value.
TEST(Desugar, SortMatchesStableSortOnRandomValuations) {
  const std::vector<std::string> programs = {
      "agents 1\nlet (I1, R) = divide(cake, 1/4) in let (I2, I3) = divide(R, 5/8) in sort_1(I1, I2, I3)",
      "agents 2\nlet (I1, R) = divide(cake, 1/8) in let (I2, R2) = divide(R, 1/2) in "
      "let (I3, I4) = divide(R2, 3/4) in sort_2(I1, I2, I3, I4)",
      "agents 1\nlet (I1, I2) = divide(cake, 1/2) in sort_1(I1, I2)"};
  for (const auto& text : programs) {
    Program p = parse(text);
    ExprPtr e = desugar(p);
    int agent = p.agent_count;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto profile = seed % 2 == 0 ? testkit::random_profile(seed, p.agent_count, 4)
                                   : std::vector<PiecewiseValuation>(p.agent_count, testkit::grid_valuation(seed, 8));
      std::vector<MarkPolicy> policy{MarkPolicy::leftmost()};
      Value out = evaluate(e, profile, policy).value;
      std::vector<Value> pieces = out.as_tuple();
      // Recover the inputs in order: they tile [0,1] left to right.
      std::vector<Value> inputs = pieces;
      std::sort(inputs.begin(), inputs.end(),
                [](const Value& a, const Value& b) { return a.as_interval().lo < b.as_interval().lo; });
      std::vector<Value> expected = inputs;
      const auto& v = profile[agent - 1];
      std::stable_sort(expected.begin(), expected.end(), [&](const Value& a, const Value& b) {
        return v.value_of(a.as_interval()) > v.value_of(b.as_interval());
      });
      ASSERT_EQ(out, Value::tuple(expected)) << text << " seed " << seed;
    }
  }
}

TEST(Desugar, SortExpandsToFactorialLeaves) {
  auto leaves = [](int n) {
    std::string args;
    for (int i = 1; i <= n; ++i) args += (i > 1 ? ", " : "") + std::string("cake");
    ExprPtr e = desugar(parse("agents 1\nsort_1(" + args + ")"));
    std::function<int(const ExprPtr&)> count = [&](const ExprPtr& x) -> int {
      if (x->kind == ExprKind::If) return count(x->kids[1]) + count(x->kids[2]);
      if (x->kind == ExprKind::Let) return count(x->kids[1]);
      return 1;
    };
    return count(e);
  };
  EXPECT_EQ(leaves(2), 2);
  EXPECT_EQ(leaves(3), 6);
  EXPECT_EQ(leaves(4), 24);
}

TEST(Desugar, OneMarkPerSurfaceOccurrence) {
  // allocRest is called twice, each call with two marks.
  const std::map<std::string, int> marks = {{"cut_choose", 1},
                                            {"surplus", 2},
                                            {"selfridge_conway", 7},
                                            {"selfridge_conway_surplus", 3},
                                            {"waste_makes_haste", 4}};
  for (const auto& [name, n] : marks) EXPECT_EQ(count_kind(corpus_expr(name), ExprKind::Mark), n) << name;
}

TEST(Desugar, DefinitionCallsSubstituteAgents) {
  ExprPtr e = desugar(parse("agents 3\ndef f(P, I) = eval_P(I);\n(f(2, cake), f(3, cake))"));
  std::vector<int> agents;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
    if (x->kind == ExprKind::Eval) agents.push_back(x->agent.index);
    for (const auto& k : x->kids) walk(k);
  };
  walk(e);
  EXPECT_EQ(agents, (std::vector<int>{2, 3}));
  EXPECT_TRUE(fv(e).empty());
}

TEST(Desugar, DefinitionCallsAvoidCapture) {
  // The argument mentions x, which the body also binds.
  Program p = parse("agents 1\ndef f(I) = let x = 1/2 in divide(I, x);\nlet x = cake in f(x)");
  std::vector<PiecewiseValuation> profile{PiecewiseValuation::uniform()};
  std::vector<MarkPolicy> policy{MarkPolicy::leftmost()};
  Value v = evaluate(p, profile, policy).value;
  EXPECT_EQ(v, Value::tuple({Value::interval(0, ratio(1, 2)), Value::interval(ratio(1, 2), 1)}));
}

TEST(Desugar, AllocIsAPlainTuple) {
  ExprPtr e = desugar(parse("agents 2\nalloc(cake, cake)"));
  EXPECT_EQ(e->kind, ExprKind::Tuple);
  EXPECT_EQ(desugar(parse("agents 1\nalloc(cake)"))->kind, ExprKind::Cake);
}

TEST(Load, MissingFileIsReported) {
  EXPECT_THROW(load_program(corpus_path("does_not_exist")), std::runtime_error);
}

}  // namespace
}  // namespace slice
