#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lmt/rational.hpp"

namespace lmt {

enum class Sort { kBool, kRational };

std::string_view to_string(Sort sort);

struct Variable {
  std::string name;
  Sort sort = Sort::kBool;

  auto operator<=>(const Variable&) const = default;
};

// [A-Za-z_][A-Za-z0-9_.-]*
bool is_valid_identifier(std::string_view name);

using Value = std::variant<bool, Rational>;

std::string to_string(const Value& value);

// A (possibly partial) map from variable names to values. Iteration is in
// name order, so printing and comparison are deterministic.
class Assignment {
 public:
  using Map = std::map<std::string, Value, std::less<>>;

  Assignment() = default;

  void set(const std::string& name, Value value) { values_[name] = std::move(value); }
  void set_bool(const std::string& name, bool value) { values_[name] = value; }
  void set_rational(const std::string& name, Rational value) { values_[name] = std::move(value); }
  void erase(std::string_view name);

  bool contains(std::string_view name) const { return values_.find(name) != values_.end(); }
  const Value* find(std::string_view name) const;

  // Throw UnboundVariable / SortError.
  bool bool_value(std::string_view name) const;
  const Rational& rational_value(std::string_view name) const;

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Map::const_iterator begin() const { return values_.begin(); }
  Map::const_iterator end() const { return values_.end(); }

  // Union; on a shared key the value from `other` wins.
  Assignment merged(const Assignment& other) const;
  // Keeps only the named variables that are present.
  Assignment projected(const std::vector<std::string>& names) const;

  bool operator==(const Assignment&) const = default;

 private:
  Map values_;
};

// sum_i coeff_i * var_i + constant over rational variables. Zero
// coefficients are never stored.
class LinExpr {
 public:
  using Terms = std::map<std::string, Rational, std::less<>>;

  LinExpr() = default;
  explicit LinExpr(Rational constant) : constant_(std::move(constant)) {}
  static LinExpr variable(const std::string& name, const Rational& coeff = 1);

  const Terms& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  Rational coeff(std::string_view name) const;
  bool is_constant() const { return terms_.empty(); }

  void add_term(const std::string& name, const Rational& coeff);
  void set_constant(Rational constant) { constant_ = std::move(constant); }

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(const Rational& factor);
  friend LinExpr operator+(LinExpr lhs, const LinExpr& rhs) { return lhs += rhs; }
  friend LinExpr operator-(LinExpr lhs, const LinExpr& rhs) { return lhs -= rhs; }
  friend LinExpr operator*(LinExpr lhs, const Rational& factor) { return lhs *= factor; }
  friend LinExpr operator*(const Rational& factor, LinExpr rhs) { return rhs *= factor; }
  LinExpr operator-() const { return *this * Rational(-1); }

  Rational evaluate(const Assignment& assignment) const;
  // Folds every variable bound in `partial` into the constant.
  LinExpr substitute(const Assignment& partial) const;

  bool operator==(const LinExpr&) const = default;

 private:
  Terms terms_;
  Rational constant_ = 0;
};

enum class Relop { kLt, kLe, kEq, kGe, kGt, kNe };

std::string_view to_string(Relop op);
// Complement: not (e < c) is e >= c, not (e = c) is e != c.
Relop negate(Relop op);
// (e op c) read right-to-left: c op' e.
Relop mirror(Relop op);
bool compare(const Rational& lhs, Relop op, const Rational& rhs);

// expr op rhs with expr.constant() == 0.
struct LinAtom {
  LinExpr expr;
  Relop op = Relop::kLe;
  Rational rhs = 0;

  bool operator==(const LinAtom&) const = default;
};

// Immutable ground formula; copies share structure.
class Formula {
 public:
  enum class Kind { kTrue, kFalse, kBoolVar, kLinAtom, kNot, kAnd, kOr, kImplies, kIff };

  Formula();  // true

  static Formula constant(bool value);
  static Formula bool_var(const std::string& name);
  static Formula atom(LinAtom atom);
  // lhs op rhs, normalized to (lhs - rhs - k) op k'. Folds to a constant
  // when no variable survives.
  static Formula compare(const LinExpr& lhs, Relop op, const LinExpr& rhs);
  static Formula negation(Formula child);
  // Zero children fold to the identity, one child to itself.
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::kTrue || kind() == Kind::kFalse; }
  bool is_true() const { return kind() == Kind::kTrue; }
  bool is_false() const { return kind() == Kind::kFalse; }
  // Only for kBoolVar.
  const std::string& var_name() const;
  // Only for kLinAtom.
  const LinAtom& lin_atom() const;
  std::span<const Formula> children() const;

  bool operator==(const Formula& other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Formula operator!(const Formula& f);
Formula operator&&(const Formula& lhs, const Formula& rhs);
Formula operator||(const Formula& lhs, const Formula& rhs);

// Throws UnboundVariable when `assignment` misses a free variable of `f` and
// SortError when a value has the wrong sort.
bool evaluate(const Formula& f, const Assignment& assignment);

// Negation normal form: no Implies/Iff, negation only directly above Boolean
// variables, negated arithmetic atoms replaced by the complementary relation,
// nested And/Or flattened and constants folded.
Formula to_nnf(const Formula& f);

std::set<Variable> free_vars(const Formula& f);

// Substitutes the bound variables and propagates constants.
Formula restrict(const Formula& f, const Assignment& partial);

// S-expression rendering, e.g. (=> p (> (+ a b (* -1024 c)) 0)).
std::string to_sexpr(const LinExpr& expr);
std::string to_sexpr(const Formula& f);

}  // namespace lmt
