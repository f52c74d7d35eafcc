#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lmt/lra.hpp"
#include "lmt/problem.hpp"

namespace lmt {

enum class SolveStatus { kOptimum, kInfeasible, kUnknown };

std::string_view to_string(SolveStatus status);

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t lp_calls = 0;
  double wall_seconds = 0;
  // The budget ran out; the assignment is the best one found so far.
  bool timed_out = false;
};

struct Solution {
  SolveStatus status = SolveStatus::kUnknown;
  Assignment assignment;  // total over the declared variables when not Infeasible
  Rational objective = 0;  // total_cost(weights, soft, assignment)
  SolveStats stats;
};

struct SolverOptions {
  std::optional<double> timeout_seconds;
  // Checks at every leaf that no ancestor bound exceeded the leaf value;
  // throws std::logic_error otherwise.
  bool verify_bounds = false;
};

// Weighted MAX-SMT. Throws MixedCostKind when a soft constraint has a linear
// cost.
Solution solve_maxsmt(const Problem& problem, const SolverOptions& options = {});

// OMT over mixed Boolean and linear costs.
Solution solve_omt(const Problem& problem, const SolverOptions& options = {});

// solve_maxsmt when every cost is Boolean, solve_omt otherwise.
Solution solve(const Problem& problem, const SolverOptions& options = {});

// Any world satisfying the hard formulas and extending the evidence.
std::optional<Assignment> check_sat(std::span<const Formula> hard,
                                    std::span<const VariableDecl> variables,
                                    const Assignment& evidence = {});

// ----- leaf compilation -----

// One way of satisfying (or paying for) a formula once every Boolean is
// fixed: a conjunction of atoms plus slack-encoded linear cost terms.
struct CostTerm {
  Rational coeff;                  // weight * scale
  std::vector<LinExpr> lower_bounds;  // slack >= each of these, and slack >= 0
};

struct Alternative {
  std::vector<LinAtom> atoms;
  std::vector<CostTerm> terms;
  Rational constant = 0;
};

// Case splits of a Boolean-free formula that must hold: one alternative per
// disjunct, two per `distinct`, in syntactic order.
std::vector<Alternative> hold_alternatives(const Formula& f);

// Alternatives of a Boolean-free soft constraint with its weight: for a
// Boolean cost the satisfied cases first, then the violated ones; for a
// linear cost one alternative per choice of disjuncts. Variables bound in
// `evidence` are substituted first.
std::vector<Alternative> soft_alternatives(const SoftConstraint& soft,
                                           const Assignment& evidence = {});

struct CompiledObjective {
  LinExpr objective;  // sum of coeff * slack, plus the constant costs
  LinSystem system;   // boxes, chosen atoms, slack lower bounds
};

// Reduces one fully decided branch (choices[j] picks an entry of
// soft_alternatives(softs[j])) to a single LP.
CompiledObjective compile_objective(std::span<const VariableDecl> variables,
                                    std::span<const SoftConstraint> softs,
                                    std::span<const std::size_t> choices,
                                    const Assignment& evidence = {});

}  // namespace lmt
