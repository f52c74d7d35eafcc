#include <doctest.h>

#include "lmt/costs.hpp"
#include "lmt/errors.hpp"
#include "oracles.hpp"

using namespace lmt;
using lmt::testing::Rng;

namespace {

LinExpr var(const std::string& name, const Rational& k = 1) { return LinExpr::variable(name, k); }
LinExpr num(const Rational& k) { return LinExpr(k); }

Assignment xy(const Rational& x, const Rational& y) {
  Assignment z;
  z.set_rational("x", x);
  z.set_rational("y", y);
  return z;
}

const Formula kSumBelow5 = Formula::compare(var("x") + var("y"), Relop::kLt, num(5));

Problem two_reals() {
  Problem p;
  p.variables = {{"x", Sort::kRational, -10, 10}, {"y", Sort::kRational, -10, 10}};
  return p;
}

Formula random_atom(Rng& rng) {
  static constexpr Relop ops[] = {Relop::kLt, Relop::kLe, Relop::kEq, Relop::kGe, Relop::kGt};
  LinExpr e = var("x", rng.uniform(-3, 3)) + var("y", rng.uniform(-3, 3));
  if (e.is_constant()) e = var("x");
  return Formula::compare(e, ops[rng.pick(5)], num(rng.uniform(-6, 6)));
}

// Linear-costable formula: And/Or over atoms, negation only above inequalities.
Formula random_costable(Rng& rng, int depth, bool and_only = false) {
  if (depth == 0 || rng.coin(0.3)) {
    Formula a = random_atom(rng);
    if (!and_only && a.lin_atom().op != Relop::kEq && rng.coin(0.3)) return !a;
    return a;
  }
  std::vector<Formula> children;
  for (int i = rng.uniform(2, 3); i > 0; --i) children.push_back(random_costable(rng, depth - 1, and_only));
  if (and_only || rng.coin()) return Formula::conjunction(std::move(children));
  return Formula::disjunction(std::move(children));
}

// The formula with every strict relation relaxed to its non-strict form.
Formula closure(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::kLinAtom: {
      LinAtom a = f.lin_atom();
      if (a.op == Relop::kLt) a.op = Relop::kLe;
      if (a.op == Relop::kGt) a.op = Relop::kGe;
      return Formula::atom(a);
    }
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      std::vector<Formula> children;
      for (const Formula& c : f.children()) children.push_back(closure(c));
      return f.kind() == Formula::Kind::kAnd ? Formula::conjunction(std::move(children))
                                             : Formula::disjunction(std::move(children));
    }
    default:
      return f;
  }
}

}  // namespace

TEST_CASE("boolean cost examples") {
  CHECK(boolean_cost(kSumBelow5, xy(4, 3)) == 1);
  CHECK(boolean_cost(kSumBelow5, xy(1, 5)) == 1);
  CHECK(boolean_cost(kSumBelow5, xy(1, 3)) == 0);
  Assignment p;
  p.set_bool("p", false);
  const Formula taut = Formula::bool_var("p") || !Formula::bool_var("p");
  CHECK(boolean_cost(taut, p) == 0);
  CHECK_THROWS_AS(boolean_cost(kSumBelow5, Assignment{}), UnboundVariable);
}

TEST_CASE("linear cost examples") {
  CHECK(linear_cost(kSumBelow5, xy(4, 3)) == 2);
  CHECK(linear_cost(kSumBelow5, xy(1, 3)) == 0);
  // x + y = 6 here, one unit past the threshold.
  CHECK(linear_cost(kSumBelow5, xy(1, 5)) == 1);
  Assignment y7;
  y7.set_rational("y", 7);
  CHECK(linear_cost(Formula::compare(var("y"), Relop::kEq, num(5)), y7) == 2);
  y7.set_rational("y", 3);
  CHECK(linear_cost(Formula::compare(var("y"), Relop::kEq, num(5)), y7) == 2);
}

TEST_CASE("linear cost of composite formulas") {
  const Formula x_big = Formula::compare(var("x"), Relop::kGt, num(4));
  const Formula y_small = Formula::compare(var("y"), Relop::kLe, num(1));
  const Assignment z = xy(1, 3);
  CHECK(linear_cost(x_big && y_small, z) == 5);
  CHECK(linear_cost(x_big || y_small, z) == 2);
  CHECK(linear_cost(!x_big, xy(6, 0)) == 2);
  CHECK(linear_cost(Formula::implies(!x_big, y_small), z) == 2);
  CHECK(linear_cost(Formula::constant(true), z) == 0);
}

TEST_CASE("linear cost rejects Boolean leaves and distinct") {
  const Formula with_bool = Formula::bool_var("p") || kSumBelow5;
  const Formula with_ne = Formula::compare(var("x"), Relop::kNe, num(1));
  const Formula negated_eq = !Formula::compare(var("x"), Relop::kEq, num(1));
  CHECK_FALSE(admits_linear_cost(with_bool));
  CHECK_FALSE(admits_linear_cost(with_ne));
  CHECK_FALSE(admits_linear_cost(negated_eq));
  CHECK(admits_linear_cost(kSumBelow5));
  Assignment z = xy(0, 0);
  z.set_bool("p", true);
  CHECK_THROWS_AS(linear_cost(with_bool, z), FormulaNotLinearCostable);
  CHECK_THROWS_AS(linear_cost(with_ne, z), FormulaNotLinearCostable);
  CHECK_THROWS_AS(linear_cost(negated_eq, z), FormulaNotLinearCostable);
}

TEST_CASE("feature map and total cost examples") {
  const std::vector<SoftConstraint> softs{
      {"f1", Formula::compare(var("x"), Relop::kLt, num(2)), CostKind::kBoolean, 1, 1},
      {"f2", kSumBelow5, CostKind::kLinear, 1, 1},
  };
  const FeatureVector psi = feature_map(softs, xy(4, 3));
  CHECK(psi == FeatureVector{1, 2});
  CHECK(feature_map(softs, xy(0, 0)) == FeatureVector{0, 0});
  CHECK(feature_map({}, xy(4, 3)).empty());

  const std::vector<Rational> ones{1, 1};
  CHECK(total_cost(ones, softs, xy(4, 3)) == 3);
  const std::vector<Rational> zeros{0, 0};
  CHECK(total_cost(zeros, softs, xy(4, 3)) == 0);
  const std::vector<Rational> one_weight{Rational(5, 2)};
  CHECK(total_cost(one_weight, std::span(softs).first(1), xy(4, 3)) == Rational(5, 2));
  CHECK_THROWS_AS(total_cost(one_weight, softs, xy(4, 3)), DimensionError);
  CHECK(dot(ones, psi) == 3);
}

TEST_CASE("scale multiplies either cost kind") {
  SoftConstraint lin{"f", kSumBelow5, CostKind::kLinear, 1, Rational(1, 4)};
  CHECK(soft_cost(lin, xy(4, 3)) == Rational(1, 2));
  SoftConstraint boo{"g", kSumBelow5, CostKind::kBoolean, 1, 3};
  CHECK(soft_cost(boo, xy(4, 3)) == 3);
}

TEST_CASE("strict atom boundary: violated, yet zero linear cost") {
  const Assignment on_boundary = xy(2, 3);
  CHECK_FALSE(evaluate(kSumBelow5, on_boundary));
  CHECK(boolean_cost(kSumBelow5, on_boundary) == 1);
  CHECK(linear_cost(kSumBelow5, on_boundary) == 0);
}

TEST_CASE("zero cost exactly when satisfied, up to strict boundaries") {
  Rng rng(31);
  const Problem decl = two_reals();
  int satisfied = 0, violated = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const Formula f = random_costable(rng, 2);
    const Assignment z = lmt::testing::random_world(rng, decl);
    const bool holds = evaluate(f, z);
    CHECK((boolean_cost(f, z) == 0) == holds);
    const Rational c = linear_cost(f, z);
    REQUIRE(c >= 0);
    if (holds) {
      ++satisfied;
      CHECK(c == 0);
    } else {
      ++violated;
      if (c == 0) CHECK(evaluate(closure(to_nnf(f)), z));
    }
  }
  CHECK(satisfied > 100);
  CHECK(violated > 100);
}

TEST_CASE("linear cost of a conjunction is convex") {
  Rng rng(32);
  const Problem decl = two_reals();
  for (int trial = 0; trial < 1000; ++trial) {
    const Formula f = random_costable(rng, 2, true);
    const Assignment a = lmt::testing::random_world(rng, decl);
    const Assignment b = lmt::testing::random_world(rng, decl);
    Assignment mid;
    for (const char* v : {"x", "y"}) {
      mid.set_rational(v, (a.rational_value(v) + b.rational_value(v)) / 2);
    }
    CHECK(linear_cost(f, mid) <= (linear_cost(f, a) + linear_cost(f, b)) / 2);
  }
}

TEST_CASE("total cost is nondecreasing in every weight") {
  Rng rng(33);
  const Problem decl = two_reals();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SoftConstraint> softs;
    std::vector<Rational> w;
    for (int j = rng.uniform(1, 4); j > 0; --j) {
      const bool linear = rng.coin();
      softs.push_back({"f" + std::to_string(j), random_costable(rng, 1),
                       linear ? CostKind::kLinear : CostKind::kBoolean, 1, 1});
      w.push_back(rng.uniform(0, 5));
    }
    const Assignment z = lmt::testing::random_world(rng, decl);
    for (const Rational& c : feature_map(softs, z)) REQUIRE(c >= 0);
    const Rational base = total_cost(w, softs, z);
    for (std::size_t j = 0; j < w.size(); ++j) {
      std::vector<Rational> more = w;
      more[j] += rng.rational(3);
      if (more[j] < w[j]) more[j] = w[j] + 1;
      CHECK(total_cost(more, softs, z) >= base);
    }
  }
}
