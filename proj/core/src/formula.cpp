#include "lmt/formula.hpp"

#include <cctype>
#include <sstream>

#include "lmt/errors.hpp"

namespace lmt {

std::string_view to_string(Sort sort) { return sort == Sort::kBool ? "Bool" : "Real"; }

bool is_valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!std::isalpha(head) && head != '_') return false;
  for (char ch : name.substr(1)) {
    auto c = static_cast<unsigned char>(ch);
    if (!std::isalnum(c) && c != '_' && c != '.' && c != '-') return false;
  }
  return true;
}

std::string to_string(const Value& value) {
  if (const bool* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  return to_string(std::get<Rational>(value));
}

// ----- Assignment -----

void Assignment::erase(std::string_view name) {
  if (auto it = values_.find(name); it != values_.end()) values_.erase(it);
}

const Value* Assignment::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

bool Assignment::bool_value(std::string_view name) const {
  const Value* v = find(name);
  if (v == nullptr) throw UnboundVariable(std::string(name));
  const bool* b = std::get_if<bool>(v);
  if (b == nullptr) throw SortError("variable '" + std::string(name) + "' is Real, expected Bool");
  return *b;
}

const Rational& Assignment::rational_value(std::string_view name) const {
  const Value* v = find(name);
  if (v == nullptr) throw UnboundVariable(std::string(name));
  const Rational* r = std::get_if<Rational>(v);
  if (r == nullptr) throw SortError("variable '" + std::string(name) + "' is Bool, expected Real");
  return *r;
}

Assignment Assignment::merged(const Assignment& other) const {
  Assignment result = *this;
  for (const auto& [name, value] : other) result.values_[name] = value;
  return result;
}

Assignment Assignment::projected(const std::vector<std::string>& names) const {
  Assignment result;
  for (const auto& name : names) {
    if (const Value* v = find(name)) result.set(name, *v);
  }
  return result;
}

// ----- LinExpr -----

LinExpr LinExpr::variable(const std::string& name, const Rational& coeff) {
  LinExpr e;
  e.add_term(name, coeff);
  return e;
}

Rational LinExpr::coeff(std::string_view name) const {
  auto it = terms_.find(name);
  return it == terms_.end() ? Rational(0) : it->second;
}

void LinExpr::add_term(const std::string& name, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(name, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  for (const auto& [name, c] : other.terms_) add_term(name, c);
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& [name, c] : other.terms_) add_term(name, -c);
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(const Rational& factor) {
  if (factor == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [name, c] : terms_) c *= factor;
  constant_ *= factor;
  return *this;
}

Rational LinExpr::evaluate(const Assignment& assignment) const {
  Rational sum = constant_;
  for (const auto& [name, c] : terms_) sum += c * assignment.rational_value(name);
  return sum;
}

LinExpr LinExpr::substitute(const Assignment& partial) const {
  LinExpr result(constant_);
  for (const auto& [name, c] : terms_) {
    if (partial.contains(name)) {
      result.constant_ += c * partial.rational_value(name);
    } else {
      result.terms_.emplace(name, c);
    }
  }
  return result;
}

// ----- Relop -----

std::string_view to_string(Relop op) {
  switch (op) {
    case Relop::kLt: return "<";
    case Relop::kLe: return "<=";
    case Relop::kEq: return "=";
    case Relop::kGe: return ">=";
    case Relop::kGt: return ">";
    case Relop::kNe: return "distinct";
  }
  return "?";
}

Relop negate(Relop op) {
  switch (op) {
    case Relop::kLt: return Relop::kGe;
    case Relop::kLe: return Relop::kGt;
    case Relop::kEq: return Relop::kNe;
    case Relop::kGe: return Relop::kLt;
    case Relop::kGt: return Relop::kLe;
    case Relop::kNe: return Relop::kEq;
  }
  return op;
}

Relop mirror(Relop op) {
  switch (op) {
    case Relop::kLt: return Relop::kGt;
    case Relop::kLe: return Relop::kGe;
    case Relop::kGe: return Relop::kLe;
    case Relop::kGt: return Relop::kLt;
    default: return op;
  }
}

bool compare(const Rational& lhs, Relop op, const Rational& rhs) {
  switch (op) {
    case Relop::kLt: return lhs < rhs;
    case Relop::kLe: return lhs <= rhs;
    case Relop::kEq: return lhs == rhs;
    case Relop::kGe: return lhs >= rhs;
    case Relop::kGt: return lhs > rhs;
    case Relop::kNe: return lhs != rhs;
  }
  return false;
}

// ----- Formula -----

struct Formula::Node {
  Kind kind = Kind::kTrue;
  std::string name;
  LinAtom atom;
  std::vector<Formula> children;
};

Formula::Formula() : Formula(constant(true)) {}

Formula Formula::constant(bool value) {
  static const auto kTrueNode = std::make_shared<const Node>(Node{Kind::kTrue, {}, {}, {}});
  static const auto kFalseNode = std::make_shared<const Node>(Node{Kind::kFalse, {}, {}, {}});
  return Formula(value ? kTrueNode : kFalseNode);
}

Formula Formula::bool_var(const std::string& name) {
  return Formula(std::make_shared<const Node>(Node{Kind::kBoolVar, name, {}, {}}));
}

Formula Formula::atom(LinAtom atom) {
  if (atom.expr.constant() != 0) {
    atom.rhs -= atom.expr.constant();
    atom.expr.set_constant(0);
  }
  if (atom.expr.is_constant()) return constant(lmt::compare(Rational(0), atom.op, atom.rhs));
  return Formula(std::make_shared<const Node>(Node{Kind::kLinAtom, {}, std::move(atom), {}}));
}

Formula Formula::compare(const LinExpr& lhs, Relop op, const LinExpr& rhs) {
  LinExpr diff = lhs - rhs;
  Rational k = -diff.constant();
  diff.set_constant(0);
  return atom(LinAtom{std::move(diff), op, std::move(k)});
}

Formula Formula::negation(Formula child) {
  return Formula(std::make_shared<const Node>(Node{Kind::kNot, {}, {}, {std::move(child)}}));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) return constant(true);
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kAnd, {}, {}, std::move(children)}));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) return constant(false);
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kOr, {}, {}, std::move(children)}));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::kImplies, {}, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::iff(Formula lhs, Formula rhs) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::kIff, {}, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const std::string& Formula::var_name() const { return node_->name; }

const LinAtom& Formula::lin_atom() const { return node_->atom; }

std::span<const Formula> Formula::children() const { return node_->children; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::kTrue:
    case Kind::kFalse: return true;
    case Kind::kBoolVar: return var_name() == other.var_name();
    case Kind::kLinAtom: return lin_atom() == other.lin_atom();
    default: return node_->children == other.node_->children;
  }
}

Formula operator!(const Formula& f) { return Formula::negation(f); }
Formula operator&&(const Formula& lhs, const Formula& rhs) {
  return Formula::conjunction({lhs, rhs});
}
Formula operator||(const Formula& lhs, const Formula& rhs) {
  return Formula::disjunction({lhs, rhs});
}

// ----- operations -----

bool evaluate(const Formula& f, const Assignment& assignment) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue: return true;
    case Kind::kFalse: return false;
    case Kind::kBoolVar: return assignment.bool_value(f.var_name());
    case Kind::kLinAtom: {
      const LinAtom& a = f.lin_atom();
      return compare(a.expr.evaluate(assignment), a.op, a.rhs);
    }
    case Kind::kNot: return !evaluate(f.children()[0], assignment);
    case Kind::kAnd: {
      // Every child is evaluated so that unbound variables are always reported.
      bool result = true;
      for (const Formula& c : f.children()) result = evaluate(c, assignment) && result;
      return result;
    }
    case Kind::kOr: {
      bool result = false;
      for (const Formula& c : f.children()) result = evaluate(c, assignment) || result;
      return result;
    }
    case Kind::kImplies: {
      bool lhs = evaluate(f.children()[0], assignment);
      bool rhs = evaluate(f.children()[1], assignment);
      return !lhs || rhs;
    }
    case Kind::kIff:
      return evaluate(f.children()[0], assignment) == evaluate(f.children()[1], assignment);
  }
  return false;
}

namespace {

// And/Or builder that flattens same-kind children and folds constants.
Formula make_junction(Formula::Kind kind, const std::vector<Formula>& parts) {
  const bool is_and = kind == Formula::Kind::kAnd;
  std::vector<Formula> flat;
  for (const Formula& p : parts) {
    if (p.is_constant()) {
      if (p.is_true() == is_and) continue;  // identity element
      return p;                             // absorbing element
    }
    if (p.kind() == kind) {
      flat.insert(flat.end(), p.children().begin(), p.children().end());
    } else {
      flat.push_back(p);
    }
  }
  return is_and ? Formula::conjunction(std::move(flat)) : Formula::disjunction(std::move(flat));
}

Formula nnf(const Formula& f, bool positive) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse: return Formula::constant(f.is_true() == positive);
    case Kind::kBoolVar: return positive ? f : Formula::negation(f);
    case Kind::kLinAtom: {
      if (positive) return f;
      LinAtom a = f.lin_atom();
      a.op = negate(a.op);
      return Formula::atom(std::move(a));
    }
    case Kind::kNot: return nnf(f.children()[0], !positive);
    case Kind::kAnd:
    case Kind::kOr: {
      std::vector<Formula> parts;
      for (const Formula& c : f.children()) parts.push_back(nnf(c, positive));
      bool as_and = (f.kind() == Kind::kAnd) == positive;
      return make_junction(as_and ? Kind::kAnd : Kind::kOr, parts);
    }
    case Kind::kImplies: {
      const Formula& a = f.children()[0];
      const Formula& b = f.children()[1];
      if (positive) return make_junction(Kind::kOr, {nnf(a, false), nnf(b, true)});
      return make_junction(Kind::kAnd, {nnf(a, true), nnf(b, false)});
    }
    case Kind::kIff: {
      const Formula& a = f.children()[0];
      const Formula& b = f.children()[1];
      // a <=> b is (a & b) | (!a & !b); its negation is (a & !b) | (!a & b).
      Formula second_b = nnf(b, !positive);
      return make_junction(
          Kind::kOr, {make_junction(Kind::kAnd, {nnf(a, true), nnf(b, positive)}),
                      make_junction(Kind::kAnd, {nnf(a, false), second_b})});
    }
  }
  return f;
}

void collect_vars(const Formula& f, std::set<Variable>& out) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse: return;
    case Kind::kBoolVar: out.insert({f.var_name(), Sort::kBool}); return;
    case Kind::kLinAtom:
      for (const auto& [name, c] : f.lin_atom().expr.terms()) out.insert({name, Sort::kRational});
      return;
    default:
      for (const Formula& c : f.children()) collect_vars(c, out);
  }
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, true); }

std::set<Variable> free_vars(const Formula& f) {
  std::set<Variable> out;
  collect_vars(f, out);
  return out;
}

Formula restrict(const Formula& f, const Assignment& partial) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue:
    case Kind::kFalse: return f;
    case Kind::kBoolVar:
      if (partial.contains(f.var_name())) return Formula::constant(partial.bool_value(f.var_name()));
      return f;
    case Kind::kLinAtom: {
      const LinAtom& a = f.lin_atom();
      bool touched = false;
      for (const auto& [name, c] : a.expr.terms()) touched = touched || partial.contains(name);
      if (!touched) return f;
      return Formula::atom(LinAtom{a.expr.substitute(partial), a.op, a.rhs});
    }
    case Kind::kNot: {
      Formula c = restrict(f.children()[0], partial);
      if (c.is_constant()) return Formula::constant(!c.is_true());
      return Formula::negation(std::move(c));
    }
    case Kind::kAnd:
    case Kind::kOr: {
      const bool is_and = f.kind() == Kind::kAnd;
      std::vector<Formula> kept;
      for (const Formula& c : f.children()) {
        Formula r = restrict(c, partial);
        if (r.is_constant()) {
          if (r.is_true() == is_and) continue;
          return r;
        }
        kept.push_back(std::move(r));
      }
      return is_and ? Formula::conjunction(std::move(kept)) : Formula::disjunction(std::move(kept));
    }
    case Kind::kImplies: {
      Formula a = restrict(f.children()[0], partial);
      Formula b = restrict(f.children()[1], partial);
      if (a.is_false() || b.is_true()) return Formula::constant(true);
      if (a.is_true()) return b;
      if (b.is_false()) return Formula::negation(std::move(a));
      return Formula::implies(std::move(a), std::move(b));
    }
    case Kind::kIff: {
      Formula a = restrict(f.children()[0], partial);
      Formula b = restrict(f.children()[1], partial);
      if (a.is_constant() && b.is_constant()) return Formula::constant(a.is_true() == b.is_true());
      if (a.is_constant()) return a.is_true() ? b : Formula::negation(std::move(b));
      if (b.is_constant()) return b.is_true() ? a : Formula::negation(std::move(a));
      return Formula::iff(std::move(a), std::move(b));
    }
  }
  return f;
}

// ----- printing -----

std::string to_sexpr(const LinExpr& expr) {
  std::vector<std::string> parts;
  for (const auto& [name, c] : expr.terms()) {
    parts.push_back(c == 1 ? name : "(* " + to_string(c) + " " + name + ")");
  }
  if (expr.constant() != 0 || parts.empty()) parts.push_back(to_string(expr.constant()));
  if (parts.size() == 1) return parts.front();
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string to_sexpr(const Formula& f) {
  using Kind = Formula::Kind;
  auto nary = [&](std::string_view head) {
    std::string out = "(" + std::string(head);
    for (const Formula& c : f.children()) out += " " + to_sexpr(c);
    return out + ")";
  };
  switch (f.kind()) {
    case Kind::kTrue: return "true";
    case Kind::kFalse: return "false";
    case Kind::kBoolVar: return f.var_name();
    case Kind::kLinAtom: {
      const LinAtom& a = f.lin_atom();
      return "(" + std::string(to_string(a.op)) + " " + to_sexpr(a.expr) + " " + to_string(a.rhs) +
             ")";
    }
    case Kind::kNot: return nary("not");
    case Kind::kAnd: return nary("and");
    case Kind::kOr: return nary("or");
    case Kind::kImplies: return nary("=>");
    case Kind::kIff: return nary("iff");
  }
  return "?";
}

}  // namespace lmt
