#include <doctest.h>

#include <stdexcept>

#include "lmt/lra.hpp"
#include "oracles.hpp"

using namespace lmt;
using lmt::testing::Rng;

namespace {

LinExpr var(const std::string& name, const Rational& k = 1) { return LinExpr::variable(name, k); }

LinSystem unit_box(std::initializer_list<const char*> names, int lo = 0, int hi = 10) {
  LinSystem s;
  for (const char* n : names) s.add_variable(n, lo, hi);
  return s;
}

bool holds(const LinConstraint& c, const Assignment& point) {
  const DeltaRational v(c.expr.evaluate(point));
  switch (c.kind) {
    case BoundKind::kLe:
      return v <= c.bound;
    case BoundKind::kGe:
      return v >= c.bound;
    case BoundKind::kEq:
      return v == c.bound;
  }
  return false;
}

bool sound(const LinSystem& system, const Assignment& point) {
  for (const std::string& name : system.variables()) {
    if (!point.contains(name)) return false;
    const Rational& x = point.rational_value(name);
    if (x < system.box(name).lo || x > system.box(name).hi) return false;
  }
  for (const LinConstraint& c : system.constraints()) {
    if (!holds(c, point)) return false;
  }
  return true;
}

LinSystem random_system(Rng& rng, bool allow_strict) {
  LinSystem s;
  const int reals = rng.uniform(1, 2);
  for (int i = 0; i < reals; ++i) {
    const int lo = rng.uniform(-10, 3);
    s.add_variable("v" + std::to_string(i), lo, rng.uniform(lo, 10));
  }
  const int rows = rng.uniform(0, 4);
  for (int r = 0; r < rows; ++r) {
    LinExpr e;
    for (int i = 0; i < reals; ++i) e.add_term("v" + std::to_string(i), rng.uniform(-3, 3));
    if (e.is_constant()) e.add_term("v0", 1);
    const int k = rng.uniform(0, 2);
    const BoundKind kind = k == 0 ? BoundKind::kLe : k == 1 ? BoundKind::kGe : BoundKind::kEq;
    int delta = 0;
    if (allow_strict && kind != BoundKind::kEq && rng.coin()) delta = kind == BoundKind::kLe ? -1 : 1;
    s.add(e, kind, DeltaRational(rng.uniform(-12, 12), delta));
  }
  return s;
}

LinExpr random_objective(Rng& rng, const LinSystem& s) {
  LinExpr obj;
  for (const std::string& v : s.variables()) obj.add_term(v, rng.uniform(-4, 4));
  return obj;
}

}  // namespace

TEST_CASE("DeltaRational orders by real part, then by the infinitesimal") {
  CHECK(DeltaRational(1, -1) < DeltaRational(1));
  CHECK(DeltaRational(1) < DeltaRational(1, 1));
  CHECK(DeltaRational(Rational(999, 1000), 5) < DeltaRational(1, -5));
  CHECK(DeltaRational(2, 3) == DeltaRational(2, 3));
  CHECK((DeltaRational(1, 2) + DeltaRational(3, -1)) == DeltaRational(4, 1));
  CHECK((DeltaRational(1, 2) * Rational(3)).delta() == 6);
  CHECK(DeltaRational(1, -1).instantiate(Rational(1, 4)) == Rational(3, 4));
}

TEST_CASE("feasible examples") {
  LinSystem apart = unit_box({"x"});
  apart.add_atom({var("x"), Relop::kLt, 1});
  apart.add_atom({var("x"), Relop::kGt, 2});
  CHECK_FALSE(feasible(apart));

  LinSystem above = unit_box({"x"});
  above.add_atom({var("x"), Relop::kGe, 3});
  auto w = feasible(above);
  REQUIRE(w);
  CHECK(w->rational_value("x") >= 3);

  LinSystem crowded = unit_box({"x", "y"});
  crowded.add_atom({var("x") + var("y"), Relop::kEq, 5});
  crowded.add_atom({var("x"), Relop::kGe, 4});
  crowded.add_atom({var("y"), Relop::kGe, 2});
  CHECK_FALSE(feasible(crowded));

  CHECK(feasible(unit_box({"x", "y"})));
  CHECK(feasible(LinSystem{}));
}

TEST_CASE("strict witnesses are concrete and strict") {
  LinSystem s = unit_box({"x", "y"});
  s.add_atom({var("x") - var("y"), Relop::kLt, 0});
  s.add_atom({var("y"), Relop::kLt, Rational(1, 1000)});
  s.add_atom({var("x"), Relop::kGt, 0});
  auto w = feasible(s);
  REQUIRE(w);
  const Rational& x = w->rational_value("x");
  const Rational& y = w->rational_value("y");
  CHECK(x > 0);
  CHECK(x < y);
  CHECK(y < Rational(1, 1000));
}

TEST_CASE("minimize examples") {
  LinSystem s1 = unit_box({"x"});
  s1.add_atom({var("x"), Relop::kGe, 3});
  auto m1 = minimize(var("x"), s1);
  REQUIRE(m1);
  CHECK(m1->value == DeltaRational(3));
  CHECK(m1->witness.rational_value("x") == 3);

  LinSystem s2 = unit_box({"x", "y"});
  s2.add_atom({var("x"), Relop::kGe, 1});
  s2.add_atom({var("y"), Relop::kGe, 2});
  auto m2 = minimize(var("x") + var("y"), s2);
  REQUIRE(m2);
  CHECK(m2->value == DeltaRational(3));
  CHECK(m2->witness.rational_value("x") == 1);
  CHECK(m2->witness.rational_value("y") == 2);

  auto m3 = minimize(var("x", -1), unit_box({"x"}));
  REQUIRE(m3);
  CHECK(m3->value == DeltaRational(-10));
  CHECK(m3->witness.rational_value("x") == 10);

  LinSystem none = unit_box({"x"});
  none.add_atom({var("x"), Relop::kGt, 10});
  CHECK_FALSE(minimize(var("x"), none));
}

TEST_CASE("an open lower bound yields an infimum and a strictly feasible witness") {
  LinSystem s = unit_box({"x"});
  s.add_atom({var("x"), Relop::kGt, 3});
  auto m = minimize(var("x"), s);
  REQUIRE(m);
  CHECK(m->value.real() == 3);
  CHECK(m->value.delta() > 0);
  CHECK(m->witness.rational_value("x") > 3);
  CHECK(m->witness.rational_value("x") <= 10);
}

TEST_CASE("constant parts move into the bound and undeclared variables are rejected") {
  LinSystem s = unit_box({"x"});
  LinExpr e = var("x");
  e.set_constant(2);
  s.add(e, BoundKind::kLe, DeltaRational(5));
  auto m = minimize(var("x", -1), s);
  REQUIRE(m);
  CHECK(m->value == DeltaRational(-3));
  CHECK_THROWS_AS(s.add(var("z"), BoundKind::kLe, DeltaRational(1)), std::invalid_argument);
  CHECK_THROWS(s.add_atom({var("x"), Relop::kNe, 1}));
}

TEST_CASE("redeclaring a variable intersects its box") {
  LinSystem s;
  s.add_variable("x", 0, 10);
  s.add_variable("x", 2, 20);
  CHECK(s.box("x").lo == 2);
  CHECK(s.box("x").hi == 10);
  CHECK(s.variables().size() == 1);
}

TEST_CASE("lexicographic minimization fixes each objective in turn") {
  LinSystem s = unit_box({"x", "y"});
  s.add_atom({var("x") + var("y"), Relop::kGe, 4});
  auto m = minimize_lexicographic({var("x") + var("y"), var("y", -1)}, s);
  REQUIRE(m);
  CHECK(m->value == DeltaRational(4));
  CHECK(m->witness.rational_value("x") == 0);
  CHECK(m->witness.rational_value("y") == 4);
}

TEST_CASE("lexicographic witnesses keep superseded strict bounds") {
  // y is pinned below x by a strict two-variable row and pushed up by the
  // second objective, so the final equality lands on top of a folded bound.
  LinSystem s = unit_box({"x", "y"}, 0, 100);
  s.add_atom({var("x") - var("y"), Relop::kGt, 0});
  s.add_atom({var("y"), Relop::kGt, 5});
  s.add_atom({var("x"), Relop::kLt, 6});
  auto m = minimize_lexicographic({var("x"), var("y", -1)}, s);
  REQUIRE(m);
  CHECK(sound(s, m->witness));
}

TEST_CASE("minimize agrees with vertex enumeration on random 2-variable systems") {
  Rng rng(21);
  int optima = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const bool strict = trial % 2 == 1;
    const LinSystem s = random_system(rng, strict);
    const LinExpr obj = random_objective(rng, s);
    auto m = minimize(obj, s);
    auto oracle = lmt::testing::vertex_enumeration_lp(obj, s);
    if (!strict) {
      REQUIRE(m.has_value() == oracle.has_value());
    } else if (m) {
      REQUIRE(oracle);  // the closure is feasible whenever the system is
    }
    if (!m) continue;
    ++optima;
    REQUIRE(sound(s, m->witness));
    CHECK(m->value.real() == *oracle);
    if (!strict) CHECK(obj.evaluate(m->witness) == *oracle);
    CHECK(obj.evaluate(m->witness) >= m->value.real());
  }
  CHECK(optima > 150);
}

TEST_CASE("feasible and lexicographic witnesses are sound on random strict systems") {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const LinSystem s = random_system(rng, true);
    auto w = feasible(s);
    if (!w) {
      CHECK_FALSE(minimize(LinExpr{}, s));
      continue;
    }
    REQUIRE(sound(s, *w));
    std::vector<LinExpr> order{random_objective(rng, s)};
    for (const std::string& v : s.variables()) order.push_back(var(v));
    auto m = minimize_lexicographic(order, s);
    REQUIRE(m);
    REQUIRE(sound(s, m->witness));
  }
}

TEST_CASE("identical input gives an identical witness") {
  Rng a(5), b(5);
  for (int trial = 0; trial < 50; ++trial) {
    const LinSystem s = random_system(a, true);
    const LinSystem t = random_system(b, true);
    const LinExpr obj = random_objective(a, s);
    random_objective(b, t);
    auto m1 = minimize(obj, s);
    auto m2 = minimize(obj, t);
    REQUIRE(m1.has_value() == m2.has_value());
    if (m1) CHECK(m1->witness == m2->witness);
  }
}
