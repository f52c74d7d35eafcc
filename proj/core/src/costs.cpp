#include "lmt/costs.hpp"

#include <algorithm>

#include "lmt/errors.hpp"

namespace lmt {

std::string_view to_string(CostKind kind) { return kind == CostKind::kBoolean ? "bool" : "linear"; }

Rational boolean_cost(const Formula& f, const Assignment& z) { return evaluate(f, z) ? 0 : 1; }

namespace {

bool linear_costable_nnf(const Formula& f) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue: return true;
    case Kind::kLinAtom: return f.lin_atom().op != Relop::kNe;
    case Kind::kAnd:
    case Kind::kOr:
      return std::all_of(f.children().begin(), f.children().end(), linear_costable_nnf);
    default: return false;
  }
}

Rational atom_cost(const LinAtom& atom, const Assignment& z) {
  const Rational lhs = atom.expr.evaluate(z);
  switch (atom.op) {
    case Relop::kLt:
    case Relop::kLe: return lhs > atom.rhs ? Rational(lhs - atom.rhs) : Rational(0);
    case Relop::kGt:
    case Relop::kGe: return lhs < atom.rhs ? Rational(atom.rhs - lhs) : Rational(0);
    case Relop::kEq: return abs(Rational(lhs - atom.rhs));
    case Relop::kNe: break;
  }
  throw FormulaNotLinearCostable("'distinct' has no linear cost");
}

Rational nnf_cost(const Formula& f, const Assignment& z) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue: return 0;
    case Kind::kLinAtom: return atom_cost(f.lin_atom(), z);
    case Kind::kAnd: {
      Rational sum = 0;
      for (const Formula& c : f.children()) sum += nnf_cost(c, z);
      return sum;
    }
    case Kind::kOr: {
      Rational best = nnf_cost(f.children()[0], z);
      for (const Formula& c : f.children().subspan(1)) best = std::min(best, nnf_cost(c, z));
      return best;
    }
    default:
      throw FormulaNotLinearCostable("linear cost needs purely arithmetic formulas, got " +
                                     to_sexpr(f));
  }
}

}  // namespace

bool admits_linear_cost(const Formula& f) { return linear_costable_nnf(to_nnf(f)); }

Rational linear_cost(const Formula& f, const Assignment& z) {
  Formula normal = to_nnf(f);
  if (!linear_costable_nnf(normal)) {
    throw FormulaNotLinearCostable("linear cost needs purely arithmetic formulas without "
                                   "'distinct', got " + to_sexpr(f));
  }
  return nnf_cost(normal, z);
}

Rational soft_cost(const SoftConstraint& soft, const Assignment& z) {
  Rational raw = soft.kind == CostKind::kBoolean ? boolean_cost(soft.formula, z)
                                                 : linear_cost(soft.formula, z);
  return raw * soft.scale;
}

FeatureVector feature_map(std::span<const SoftConstraint> softs, const Assignment& z) {
  FeatureVector out;
  out.reserve(softs.size());
  for (const SoftConstraint& s : softs) out.push_back(soft_cost(s, z));
  return out;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  Rational sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Rational total_cost(std::span<const Rational> weights, std::span<const SoftConstraint> softs,
                    const Assignment& z) {
  if (weights.size() != softs.size()) {
    throw DimensionError("expected " + std::to_string(softs.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  FeatureVector psi = feature_map(softs, z);
  return dot(weights, psi);
}

}  // namespace lmt
