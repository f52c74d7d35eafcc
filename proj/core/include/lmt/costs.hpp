#pragma once

#include <span>
#include <string>
#include <vector>

#include "lmt/formula.hpp"
#include "lmt/rational.hpp"

namespace lmt {

enum class CostKind { kBoolean, kLinear };

std::string_view to_string(CostKind kind);

struct SoftConstraint {
  std::string id;
  Formula formula;
  CostKind kind = CostKind::kBoolean;
  Rational weight = 1;
  // Multiplies the cost; lets linear costs be expressed in comparable units.
  Rational scale = 1;

  bool operator==(const SoftConstraint&) const = default;
};

using FeatureVector = std::vector<Rational>;

// 0 if z satisfies f, 1 otherwise.
Rational boolean_cost(const Formula& f, const Assignment& z);

// True when every leaf of f (after NNF) is an arithmetic atom other than
// `distinct`.
bool admits_linear_cost(const Formula& f);

// Amount of violation, computed on the NNF of f:
//   e < c, e <= c  ->  max(e - c, 0)
//   e > c, e >= c  ->  max(c - e, 0)
//   e = c          ->  |e - c|
//   and            ->  sum of children
//   or             ->  min of children
// Throws FormulaNotLinearCostable when f has Boolean leaves or `distinct`.
Rational linear_cost(const Formula& f, const Assignment& z);

// scale * (boolean_cost or linear_cost, per kind).
Rational soft_cost(const SoftConstraint& soft, const Assignment& z);

// One component per soft constraint, in declaration order.
FeatureVector feature_map(std::span<const SoftConstraint> softs, const Assignment& z);

// w . feature_map(softs, z). Throws DimensionError when |w| != |softs|.
Rational total_cost(std::span<const Rational> weights, std::span<const SoftConstraint> softs,
                    const Assignment& z);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

}  // namespace lmt
