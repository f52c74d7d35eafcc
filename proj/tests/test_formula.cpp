#include <doctest.h>

#include "lmt/errors.hpp"
#include "lmt/formula.hpp"
#include "oracles.hpp"

using namespace lmt;
using lmt::testing::Rng;

namespace {

LinExpr var(const std::string& name, const Rational& k = 1) { return LinExpr::variable(name, k); }
LinExpr num(const Rational& k) { return LinExpr(k); }
Formula p() { return Formula::bool_var("p"); }
Formula q() { return Formula::bool_var("q"); }

bool is_nnf(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::kImplies:
    case Formula::Kind::kIff:
      return false;
    case Formula::Kind::kNot:
      return f.children()[0].kind() == Formula::Kind::kBoolVar;
    default:
      for (const Formula& c : f.children()) {
        if (!is_nnf(c)) return false;
      }
      return true;
  }
}

// Formulas of random instances, together with their declarations.
std::vector<std::pair<Problem, Formula>> random_formulas(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<std::pair<Problem, Formula>> out;
  while (static_cast<int>(out.size()) < count) {
    Problem problem = lmt::testing::random_maxsmt_instance(rng);
    for (const Formula& f : problem.hard) out.emplace_back(problem, f);
    for (const SoftConstraint& s : problem.soft) out.emplace_back(problem, s.formula);
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate on the worked examples") {
  const Formula sum_below = Formula::compare(var("x") + var("y"), Relop::kLt, num(5));
  Assignment z;
  z.set_rational("x", 4);
  z.set_rational("y", 3);
  CHECK_FALSE(evaluate(sum_below, z));

  const Formula rule = Formula::implies(
      Formula::bool_var("HasProperty"), Formula::compare(var("a") + var("b"), Relop::kGt, var("c", 1024)));
  Assignment s;
  s.set_bool("HasProperty", false);
  s.set_rational("a", 0);
  s.set_rational("b", 0);
  s.set_rational("c", 1);
  CHECK(evaluate(rule, s));
  s.set_bool("HasProperty", true);
  CHECK_FALSE(evaluate(rule, s));

  Assignment only_p;
  only_p.set_bool("p", true);
  CHECK_FALSE(evaluate(p() && !p(), only_p));
  only_p.set_bool("p", false);
  CHECK_FALSE(evaluate(p() && !p(), only_p));
}

TEST_CASE("strict and non-strict relations are exact") {
  Assignment z;
  z.set_rational("x", Rational(1, 3));
  CHECK_FALSE(evaluate(Formula::compare(var("x", 3), Relop::kLt, num(1)), z));
  CHECK(evaluate(Formula::compare(var("x", 3), Relop::kLe, num(1)), z));
  CHECK(evaluate(Formula::compare(var("x", 3), Relop::kEq, num(1)), z));
  CHECK_FALSE(evaluate(Formula::compare(var("x", 3), Relop::kNe, num(1)), z));
  CHECK(evaluate(Formula::compare(var("x"), Relop::kGt, num(Rational(333333, 1000000))), z));
}

TEST_CASE("evaluate reports missing and mis-sorted variables") {
  const Formula f = Formula::compare(var("x"), Relop::kLt, num(1));
  CHECK_THROWS_AS(evaluate(f, Assignment{}), UnboundVariable);
  Assignment wrong;
  wrong.set_bool("x", true);
  CHECK_THROWS_AS(evaluate(f, wrong), SortError);
  Assignment also_wrong;
  also_wrong.set_rational("p", 1);
  CHECK_THROWS_AS(evaluate(p(), also_wrong), SortError);
}

TEST_CASE("to_nnf examples") {
  CHECK(to_nnf(!Formula::compare(var("x"), Relop::kLt, num(5))) ==
        Formula::compare(var("x"), Relop::kGe, num(5)));
  CHECK(to_nnf(!Formula::compare(var("x"), Relop::kEq, num(5))) ==
        Formula::compare(var("x"), Relop::kNe, num(5)));
  CHECK(to_nnf(!(p() && q())) == (!p() || !q()));
  CHECK(to_nnf(Formula::implies(p(), q())) == (!p() || q()));
}

TEST_CASE("free_vars examples") {
  const std::set<Variable> xy{{"x", Sort::kRational}, {"y", Sort::kRational}};
  CHECK(free_vars(Formula::compare(var("x") + var("y"), Relop::kLt, num(5))) == xy);
  const std::set<Variable> px{{"p", Sort::kBool}, {"x", Sort::kRational}};
  CHECK(free_vars(Formula::implies(p(), Formula::compare(var("x"), Relop::kGt, num(0)))) == px);
  CHECK(free_vars(Formula::conjunction({p(), p()})) == std::set<Variable>{{"p", Sort::kBool}});
}

TEST_CASE("restrict examples") {
  Assignment x4;
  x4.set_rational("x", 4);
  CHECK(restrict(Formula::compare(var("x") + var("y"), Relop::kLt, num(5)), x4) ==
        Formula::compare(var("y"), Relop::kLt, num(1)));
  Assignment p_false;
  p_false.set_bool("p", false);
  CHECK(restrict(Formula::implies(p(), q()), p_false).is_true());
  CHECK(restrict(p() || q(), p_false) == q());
  Assignment bad;
  bad.set_bool("x", true);
  CHECK_THROWS_AS(restrict(Formula::compare(var("x"), Relop::kLt, num(5)), bad), SortError);
}

TEST_CASE("identifiers") {
  CHECK(is_valid_identifier("wake.start"));
  CHECK(is_valid_identifier("_a-1"));
  CHECK_FALSE(is_valid_identifier(""));
  CHECK_FALSE(is_valid_identifier("1x"));
  CHECK_FALSE(is_valid_identifier("a b"));
}

TEST_CASE("LinExpr keeps no zero coefficients") {
  LinExpr e = var("x", 2) + var("y");
  e -= var("x", 2);
  CHECK(e.terms().size() == 1);
  CHECK(e.coeff("x") == 0);
  CHECK(e == var("y"));
}

TEST_CASE("NNF preserves truth on random formulas and worlds") {
  Rng rng(7);
  int cases = 0;
  for (const auto& [problem, f] : random_formulas(11, 400)) {
    const Formula nnf = to_nnf(f);
    REQUIRE(is_nnf(nnf));
    for (int k = 0; k < 4; ++k) {
      const Assignment z = lmt::testing::random_world(rng, problem);
      REQUIRE(evaluate(nnf, z) == evaluate(f, z));
      ++cases;
    }
  }
  CHECK(cases >= 1000);
}

TEST_CASE("restrict composes and removes the bound variables") {
  Rng rng(8);
  int cases = 0;
  for (const auto& [problem, f] : random_formulas(12, 300)) {
    const Assignment z = lmt::testing::random_world(rng, problem);
    Assignment p1, p2;
    for (const auto& [name, value] : z) {
      switch (rng.uniform(0, 2)) {
        case 0:
          p1.set(name, value);
          break;
        case 1:
          p2.set(name, value);
          break;
        default:
          break;
      }
    }
    const Formula once = restrict(f, p1.merged(p2));
    const Formula twice = restrict(restrict(f, p1), p2);
    for (const Variable& v : free_vars(once)) REQUIRE_FALSE(p1.merged(p2).contains(v.name));
    REQUIRE(evaluate(once, z) == evaluate(f, z));
    REQUIRE(evaluate(twice, z) == evaluate(once, z));
    ++cases;
  }
  CHECK(cases >= 300);
}

TEST_CASE("evaluate is repeatable") {
  Rng rng(9);
  for (const auto& [problem, f] : random_formulas(13, 50)) {
    const Assignment z = lmt::testing::random_world(rng, problem);
    const bool first = evaluate(f, z);
    CHECK(evaluate(f, z) == first);
  }
}
