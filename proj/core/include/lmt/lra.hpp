#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "lmt/formula.hpp"
#include "lmt/rational.hpp"

namespace lmt {

// real + delta * d, where d is a positive infinitesimal. Ordered
// lexicographically, so x < c is x <= c - d.
class DeltaRational {
 public:
  DeltaRational() = default;
  DeltaRational(Rational real, Rational delta = 0) : real_(std::move(real)), delta_(std::move(delta)) {}

  const Rational& real() const { return real_; }
  const Rational& delta() const { return delta_; }

  DeltaRational& operator+=(const DeltaRational& o) {
    real_ += o.real_;
    delta_ += o.delta_;
    return *this;
  }
  DeltaRational& operator-=(const DeltaRational& o) {
    real_ -= o.real_;
    delta_ -= o.delta_;
    return *this;
  }
  DeltaRational& operator*=(const Rational& k) {
    real_ *= k;
    delta_ *= k;
    return *this;
  }
  DeltaRational& operator/=(const Rational& k) {
    real_ /= k;
    delta_ /= k;
    return *this;
  }
  friend DeltaRational operator+(DeltaRational a, const DeltaRational& b) { return a += b; }
  friend DeltaRational operator-(DeltaRational a, const DeltaRational& b) { return a -= b; }
  friend DeltaRational operator*(DeltaRational a, const Rational& k) { return a *= k; }
  friend DeltaRational operator/(DeltaRational a, const Rational& k) { return a /= k; }

  friend bool operator==(const DeltaRational& a, const DeltaRational& b) {
    return a.real_ == b.real_ && a.delta_ == b.delta_;
  }
  friend std::strong_ordering operator<=>(const DeltaRational& a, const DeltaRational& b) {
    if (int c = cmp(a.real_, b.real_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    int c = cmp(a.delta_, b.delta_);
    if (c == 0) return std::strong_ordering::equal;
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  Rational instantiate(const Rational& delta_value) const { return real_ + delta_ * delta_value; }

 private:
  Rational real_ = 0;
  Rational delta_ = 0;
};

std::string to_string(const DeltaRational& value);

enum class BoundKind { kLe, kEq, kGe };

// expr kind bound; expr carries no constant.
struct LinConstraint {
  LinExpr expr;
  BoundKind kind = BoundKind::kLe;
  DeltaRational bound;
};

struct Box {
  Rational lo;
  Rational hi;
};

// Conjunction of linear constraints over box-bounded rational variables.
class LinSystem {
 public:
  // Redeclaring a variable intersects the boxes.
  void add_variable(const std::string& name, const Rational& lo, const Rational& hi);
  bool has_variable(std::string_view name) const;
  const Box& box(std::string_view name) const;

  // The constant of `expr` is moved into the bound. Every variable of
  // `expr` must already be declared (std::invalid_argument otherwise).
  void add(LinExpr expr, BoundKind kind, DeltaRational bound);
  // Strict relations become delta-shifted bounds; `distinct` is rejected.
  void add_atom(const LinAtom& atom);

  const std::vector<std::string>& variables() const { return names_; }
  const std::vector<LinConstraint>& constraints() const { return constraints_; }

 private:
  std::vector<std::string> names_;
  std::vector<Box> boxes_;
  std::vector<LinConstraint> constraints_;
};

struct LpOptimum {
  DeltaRational value;  // exact optimum, possibly an unattained infimum
  Assignment witness;   // concrete point; delta instantiated
};

// A satisfying point over all declared variables, or nullopt when the
// system is unsatisfiable.
std::optional<Assignment> feasible(const LinSystem& system);

// Minimum of `objective` (Bland's rule, so the optimal vertex is a pure
// function of the input), or nullopt when infeasible.
std::optional<LpOptimum> minimize(const LinExpr& objective, const LinSystem& system);

// Minimizes objectives[0]; fixes it at its optimum, minimizes objectives[1],
// and so on. The returned value is the optimum of objectives[0].
std::optional<LpOptimum> minimize_lexicographic(const std::vector<LinExpr>& objectives,
                                                LinSystem system);

}  // namespace lmt
