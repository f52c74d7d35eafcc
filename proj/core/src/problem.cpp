#include "lmt/problem.hpp"

#include <set>

#include "lmt/errors.hpp"

namespace lmt {

const VariableDecl* Problem::find_variable(std::string_view name) const {
  for (const VariableDecl& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<Rational> Problem::weights() const {
  std::vector<Rational> w;
  w.reserve(soft.size());
  for (const SoftConstraint& s : soft) w.push_back(s.weight);
  return w;
}

bool Problem::all_boolean_costs() const {
  for (const SoftConstraint& s : soft) {
    if (s.kind != CostKind::kBoolean) return false;
  }
  return true;
}

namespace {

void check_sorts(const Problem& p, const Formula& f, const std::string& where) {
  for (const Variable& v : free_vars(f)) {
    const VariableDecl* decl = p.find_variable(v.name);
    if (decl == nullptr) throw SortError(where + ": undeclared variable '" + v.name + "'");
    if (decl->sort != v.sort) {
      throw SortError(where + ": variable '" + v.name + "' is " + std::string(to_string(decl->sort)) +
                      " but used as " + std::string(to_string(v.sort)));
    }
  }
}

}  // namespace

void Problem::validate() const {
  std::set<std::string, std::less<>> names;
  for (const VariableDecl& v : variables) {
    if (!is_valid_identifier(v.name)) throw DomainError("invalid variable name '" + v.name + "'");
    if (!names.insert(v.name).second) throw DuplicateId("variable '" + v.name + "' declared twice");
    if (v.sort == Sort::kRational && v.lo > v.hi) {
      throw DomainError("empty box for '" + v.name + "'");
    }
  }
  for (std::size_t i = 0; i < hard.size(); ++i) check_sorts(*this, hard[i], "hard #" + std::to_string(i));
  std::set<std::string, std::less<>> ids;
  for (const SoftConstraint& s : soft) {
    if (!is_valid_identifier(s.id)) throw DomainError("invalid soft id '" + s.id + "'");
    if (!ids.insert(s.id).second) throw DuplicateId("soft id '" + s.id + "' used twice");
    if (s.weight < 0) throw DomainError("soft '" + s.id + "' has a negative weight");
    if (s.scale < 0) throw DomainError("soft '" + s.id + "' has a negative scale");
    check_sorts(*this, s.formula, "soft " + s.id);
    if (s.kind == CostKind::kLinear && !admits_linear_cost(s.formula)) {
      throw DomainError("soft '" + s.id + "' cannot take a linear cost");
    }
  }
  for (const auto& [name, value] : evidence) {
    const VariableDecl* decl = find_variable(name);
    if (decl == nullptr) throw DomainError("evidence on undeclared variable '" + name + "'");
    const bool is_bool = std::holds_alternative<bool>(value);
    if (is_bool != (decl->sort == Sort::kBool)) {
      throw SortError("evidence for '" + name + "' has the wrong sort");
    }
    if (!is_bool) {
      const Rational& r = std::get<Rational>(value);
      if (r < decl->lo || r > decl->hi) throw DomainError("evidence for '" + name + "' is outside its box");
    }
  }
}

}  // namespace lmt
