#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmt/costs.hpp"
#include "lmt/formula.hpp"

namespace lmt {

struct VariableDecl {
  std::string name;
  Sort sort = Sort::kBool;
  // Box of a Real variable; unused for Bool.
  Rational lo = 0;
  Rational hi = 0;

  bool operator==(const VariableDecl&) const = default;
};

// One MAX-SMT / OMT instance: declarations, hard formulas (infinite weight),
// weighted soft constraints and optional evidence.
struct Problem {
  std::vector<VariableDecl> variables;
  std::vector<Formula> hard;
  std::vector<SoftConstraint> soft;
  Assignment evidence;

  const VariableDecl* find_variable(std::string_view name) const;
  std::vector<Rational> weights() const;
  bool all_boolean_costs() const;

  // Throws SortError, DomainError or DuplicateId when an invariant is broken:
  // unique valid names, lo <= hi, formulas over declared variables with the
  // right sorts, unique soft ids, nonnegative weights, linear-costable
  // linear softs, evidence over declared variables and inside the boxes.
  void validate() const;

  bool operator==(const Problem&) const = default;
};

}  // namespace lmt
