#include "lmt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "lmt/errors.hpp"

namespace lmt {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimum: return "optimum";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnknown: return "unknown";
  }
  return "?";
}

// ----- alternatives -----

namespace {

void append(Alternative& into, const Alternative& from) {
  into.atoms.insert(into.atoms.end(), from.atoms.begin(), from.atoms.end());
  into.terms.insert(into.terms.end(), from.terms.begin(), from.terms.end());
  into.constant += from.constant;
}

std::vector<Alternative> product(const std::vector<Alternative>& lhs,
                                 const std::vector<Alternative>& rhs) {
  std::vector<Alternative> out;
  out.reserve(lhs.size() * rhs.size());
  for (const Alternative& a : lhs) {
    for (const Alternative& b : rhs) {
      Alternative merged = a;
      append(merged, b);
      out.push_back(std::move(merged));
    }
  }
  return out;
}

std::vector<Alternative> dnf(const Formula& f) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue: return {Alternative{}};
    case Kind::kFalse: return {};
    case Kind::kLinAtom: {
      const LinAtom& a = f.lin_atom();
      if (a.op != Relop::kNe) return {Alternative{{a}, {}, 0}};
      return {Alternative{{LinAtom{a.expr, Relop::kLt, a.rhs}}, {}, 0},
              Alternative{{LinAtom{a.expr, Relop::kGt, a.rhs}}, {}, 0}};
    }
    case Kind::kAnd: {
      std::vector<Alternative> acc{Alternative{}};
      for (const Formula& c : f.children()) {
        acc = product(acc, dnf(c));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Kind::kOr: {
      std::vector<Alternative> out;
      for (const Formula& c : f.children()) {
        auto part = dnf(c);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    default:
      throw std::logic_error("Boolean structure left in a theory formula: " + to_sexpr(f));
  }
}

std::vector<Alternative> cost_alternatives(const Formula& f, const Rational& coeff,
                                           const Assignment& evidence) {
  using Kind = Formula::Kind;
  switch (f.kind()) {
    case Kind::kTrue: return {Alternative{}};
    case Kind::kLinAtom: {
      const LinAtom& a = f.lin_atom();
      LinExpr diff = a.expr.substitute(evidence) - LinExpr(a.rhs);
      std::vector<LinExpr> bounds;
      switch (a.op) {
        case Relop::kLt:
        case Relop::kLe: bounds = {diff}; break;
        case Relop::kGt:
        case Relop::kGe: bounds = {-diff}; break;
        case Relop::kEq: bounds = {diff, -diff}; break;
        case Relop::kNe: throw FormulaNotLinearCostable("'distinct' has no linear cost");
      }
      if (diff.is_constant()) {
        Rational worst = 0;
        for (const LinExpr& b : bounds) worst = std::max(worst, b.constant());
        return {Alternative{{}, {}, coeff * worst}};
      }
      return {Alternative{{}, {CostTerm{coeff, std::move(bounds)}}, 0}};
    }
    case Kind::kAnd: {
      std::vector<Alternative> acc{Alternative{}};
      for (const Formula& c : f.children()) acc = product(acc, cost_alternatives(c, coeff, evidence));
      return acc;
    }
    case Kind::kOr: {
      std::vector<Alternative> out;
      for (const Formula& c : f.children()) {
        auto part = cost_alternatives(c, coeff, evidence);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    default:
      throw FormulaNotLinearCostable("linear cost needs purely arithmetic formulas, got " +
                                     to_sexpr(f));
  }
}

std::vector<Alternative> boolean_soft_alternatives(const Formula& restricted, const Rational& coeff) {
  std::vector<Alternative> out = dnf(to_nnf(restricted));
  for (Alternative violated : dnf(to_nnf(Formula::negation(restricted)))) {
    violated.constant += coeff;
    out.push_back(std::move(violated));
  }
  return out;
}

Rational max_over_box(const LinExpr& e, const LinSystem& system) {
  Rational v = e.constant();
  for (const auto& [name, c] : e.terms()) {
    const Box& b = system.box(name);
    v += c * (c > 0 ? b.hi : b.lo);
  }
  return v;
}

// Declares the free Real variables, then the chosen atoms and one slack per
// cost term. The objective carries the constant costs.
LinSystem build_system(std::span<const VariableDecl> variables, const Assignment& evidence,
                       const Alternative& chosen, LinExpr& objective) {
  LinSystem system;
  for (const VariableDecl& v : variables) {
    if (v.sort == Sort::kRational && !evidence.contains(v.name)) system.add_variable(v.name, v.lo, v.hi);
  }
  for (const LinAtom& a : chosen.atoms) system.add_atom(a);
  objective = LinExpr(chosen.constant);
  for (std::size_t k = 0; k < chosen.terms.size(); ++k) {
    const CostTerm& term = chosen.terms[k];
    const std::string slack = "#t" + std::to_string(k);
    Rational upper = 0;
    for (const LinExpr& lb : term.lower_bounds) upper = std::max(upper, max_over_box(lb, system));
    system.add_variable(slack, 0, upper);
    for (const LinExpr& lb : term.lower_bounds) {
      system.add(LinExpr::variable(slack) - lb, BoundKind::kGe, DeltaRational(0));
    }
    objective.add_term(slack, term.coeff);
  }
  return system;
}

}  // namespace

std::vector<Alternative> hold_alternatives(const Formula& f) { return dnf(to_nnf(f)); }

std::vector<Alternative> soft_alternatives(const SoftConstraint& soft, const Assignment& evidence) {
  const Rational coeff = soft.weight * soft.scale;
  if (coeff == 0) return {Alternative{}};
  if (soft.kind == CostKind::kBoolean) {
    return boolean_soft_alternatives(restrict(soft.formula, evidence), coeff);
  }
  return cost_alternatives(to_nnf(soft.formula), coeff, evidence);
}

CompiledObjective compile_objective(std::span<const VariableDecl> variables,
                                    std::span<const SoftConstraint> softs,
                                    std::span<const std::size_t> choices,
                                    const Assignment& evidence) {
  if (choices.size() != softs.size()) throw DimensionError("one choice per soft constraint expected");
  Alternative chosen;
  for (std::size_t j = 0; j < softs.size(); ++j) {
    auto alternatives = soft_alternatives(softs[j], evidence);
    if (choices[j] >= alternatives.size()) {
      throw std::out_of_range("soft '" + softs[j].id + "' has only " +
                              std::to_string(alternatives.size()) + " alternatives");
    }
    append(chosen, alternatives[choices[j]]);
  }
  CompiledObjective out;
  out.system = build_system(variables, evidence, chosen, out.objective);
  return out;
}

// ----- branch and bound -----

namespace {

using Clock = std::chrono::steady_clock;

struct WeightedFormula {
  Formula formula;
  Rational coeff;
};

class Search {
 public:
  Search(const Problem& problem, const SolverOptions& options)
      : problem_(problem), options_(options), start_(Clock::now()) {
    if (options.timeout_seconds) {
      deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(*options.timeout_seconds));
    }
  }

  Solution run() {
    const Assignment& evidence = problem_.evidence;
    std::vector<Formula> hard;
    for (const Formula& f : problem_.hard) {
      Formula r = restrict(f, evidence);
      if (r.is_false()) return finish();
      if (!r.is_true()) hard.push_back(std::move(r));
    }
    std::vector<WeightedFormula> boolean_softs;
    Rational constant = 0;
    for (const SoftConstraint& s : problem_.soft) {
      const Rational coeff = s.weight * s.scale;
      if (coeff == 0) continue;
      if (s.kind == CostKind::kLinear) {
        linear_items_.push_back(soft_alternatives(s, evidence));
        continue;
      }
      Formula r = restrict(s.formula, evidence);
      if (r.is_false()) {
        constant += coeff;
      } else if (!r.is_true()) {
        boolean_softs.push_back({std::move(r), coeff});
      }
    }
    for (const VariableDecl& v : problem_.variables) {
      if (v.sort == Sort::kBool && !evidence.contains(v.name)) bool_vars_.push_back(v.name);
    }
    Assignment booleans;
    branch_booleans(0, booleans, std::move(hard), std::move(boolean_softs), constant);
    return finish();
  }

 private:
  bool out_of_time() {
    if (timed_out_) return true;
    if (deadline_ && Clock::now() > *deadline_) timed_out_ = true;
    return timed_out_;
  }

  bool pruned(const DeltaRational& bound) const { return best_ && bound >= best_->value; }

  void branch_booleans(std::size_t k, Assignment& booleans, std::vector<Formula> hard,
                       std::vector<WeightedFormula> softs, const Rational& constant) {
    if (out_of_time()) return;
    ++stats_.nodes;
    const DeltaRational bound(constant);
    if (pruned(bound)) return;
    path_.push_back(bound);
    const std::size_t first = k;

    // Variables that no longer occur are fixed to false without branching.
    while (k < bool_vars_.size() && !occurs(bool_vars_[k], hard, softs)) {
      booleans.set_bool(bool_vars_[k], false);
      ++k;
    }
    if (k == bool_vars_.size()) {
      solve_theory(booleans, hard, softs, constant);
    } else {
      const std::string& var = bool_vars_[k];
      for (bool value : {false, true}) {
        Assignment unit;
        unit.set_bool(var, value);
        std::vector<Formula> next_hard;
        bool dead = false;
        for (const Formula& f : hard) {
          Formula r = restrict(f, unit);
          if (r.is_false()) {
            dead = true;
            break;
          }
          if (!r.is_true()) next_hard.push_back(std::move(r));
        }
        if (dead) continue;
        std::vector<WeightedFormula> next_softs;
        Rational next_constant = constant;
        for (const WeightedFormula& s : softs) {
          Formula r = restrict(s.formula, unit);
          if (r.is_false()) {
            next_constant += s.coeff;
          } else if (!r.is_true()) {
            next_softs.push_back({std::move(r), s.coeff});
          }
        }
        booleans.set_bool(var, value);
        branch_booleans(k + 1, booleans, std::move(next_hard), std::move(next_softs), next_constant);
      }
    }
    for (std::size_t j = first; j < bool_vars_.size(); ++j) booleans.erase(bool_vars_[j]);
    path_.pop_back();
  }

  static bool occurs(const std::string& var, const std::vector<Formula>& hard,
                     const std::vector<WeightedFormula>& softs) {
    const Variable v{var, Sort::kBool};
    for (const Formula& f : hard) {
      if (free_vars(f).contains(v)) return true;
    }
    for (const WeightedFormula& s : softs) {
      if (free_vars(s.formula).contains(v)) return true;
    }
    return false;
  }

  void solve_theory(const Assignment& booleans, const std::vector<Formula>& hard,
                    const std::vector<WeightedFormula>& softs, const Rational& constant) {
    std::vector<std::vector<Alternative>> items;
    for (const Formula& f : hard) items.push_back(hold_alternatives(f));
    for (const WeightedFormula& s : softs) items.push_back(boolean_soft_alternatives(s.formula, s.coeff));
    for (const auto& item : linear_items_) items.push_back(item);
    for (const auto& item : items) {
      if (item.empty()) return;
    }
    booleans_ = &booleans;
    base_constant_ = constant;
    branch_cases(items, 0, Alternative{}, DeltaRational(0));
  }

  // `lp_value` is the LP optimum (constants included) for `chosen`.
  void branch_cases(const std::vector<std::vector<Alternative>>& items, std::size_t k,
                    const Alternative& chosen, const DeltaRational& lp_value) {
    if (k == items.size()) {
      reach_leaf(chosen, lp_value + DeltaRational(base_constant_));
      return;
    }
    for (const Alternative& alt : items[k]) {
      if (out_of_time()) return;
      ++stats_.nodes;
      Alternative next = chosen;
      append(next, alt);
      DeltaRational value;
      if (alt.atoms.empty() && alt.terms.empty()) {
        value = lp_value + DeltaRational(alt.constant);
      } else {
        ++stats_.lp_calls;
        LinExpr objective;
        LinSystem system = build_system(problem_.variables, problem_.evidence, next, objective);
        auto opt = minimize(objective, system);
        if (!opt) continue;
        value = opt->value;
      }
      const DeltaRational bound = value + DeltaRational(base_constant_);
      if (pruned(bound)) continue;
      path_.push_back(bound);
      branch_cases(items, k + 1, next, value);
      path_.pop_back();
    }
  }

  void reach_leaf(const Alternative& chosen, const DeltaRational& value) {
    if (options_.verify_bounds) {
      for (const DeltaRational& b : path_) {
        if (b > value) {
          throw std::logic_error("inadmissible bound " + to_string(b) + " above leaf value " +
                                 to_string(value));
        }
      }
    }
    if (best_ && value >= best_->value) return;
    best_ = Incumbent{value, *booleans_, chosen};
  }

  Solution finish() {
    Solution out;
    if (best_) {
      LinExpr objective;
      LinSystem system = build_system(problem_.variables, problem_.evidence, best_->chosen, objective);
      std::vector<LinExpr> order{objective};
      for (const VariableDecl& v : problem_.variables) {
        if (v.sort == Sort::kRational && !problem_.evidence.contains(v.name)) {
          order.push_back(LinExpr::variable(v.name));
        }
      }
      ++stats_.lp_calls;
      auto opt = minimize_lexicographic(order, std::move(system));
      if (!opt) throw std::logic_error("incumbent leaf became infeasible");
      Assignment world = problem_.evidence.merged(best_->booleans);
      for (const VariableDecl& v : problem_.variables) {
        if (world.contains(v.name)) continue;
        if (v.sort == Sort::kBool) {
          world.set_bool(v.name, false);
        } else {
          world.set_rational(v.name, opt->witness.rational_value(v.name));
        }
      }
      for (const Formula& f : problem_.hard) {
        if (!evaluate(f, world)) throw std::logic_error("witness violates hard formula " + to_sexpr(f));
      }
      out.status = SolveStatus::kOptimum;
      out.assignment = std::move(world);
      out.objective = total_cost(problem_.weights(), problem_.soft, out.assignment);
    } else {
      out.status = timed_out_ ? SolveStatus::kUnknown : SolveStatus::kInfeasible;
    }
    stats_.timed_out = timed_out_;
    stats_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    out.stats = stats_;
    return out;
  }

  struct Incumbent {
    DeltaRational value;
    Assignment booleans;
    Alternative chosen;
  };

  const Problem& problem_;
  const SolverOptions& options_;
  Clock::time_point start_;
  std::optional<Clock::time_point> deadline_;
  bool timed_out_ = false;
  SolveStats stats_;
  std::vector<std::string> bool_vars_;
  std::vector<std::vector<Alternative>> linear_items_;
  std::vector<DeltaRational> path_;
  const Assignment* booleans_ = nullptr;
  Rational base_constant_ = 0;
  std::optional<Incumbent> best_;
};

}  // namespace

Solution solve_omt(const Problem& problem, const SolverOptions& options) {
  problem.validate();
  return Search(problem, options).run();
}

Solution solve_maxsmt(const Problem& problem, const SolverOptions& options) {
  if (!problem.all_boolean_costs()) {
    throw MixedCostKind("MAX-SMT mode needs Boolean costs on every soft constraint");
  }
  return solve_omt(problem, options);
}

Solution solve(const Problem& problem, const SolverOptions& options) {
  return problem.all_boolean_costs() ? solve_maxsmt(problem, options) : solve_omt(problem, options);
}

std::optional<Assignment> check_sat(std::span<const Formula> hard,
                                    std::span<const VariableDecl> variables,
                                    const Assignment& evidence) {
  Problem p;
  p.variables.assign(variables.begin(), variables.end());
  p.hard.assign(hard.begin(), hard.end());
  p.evidence = evidence;
  Solution s = solve_maxsmt(p);
  if (s.status != SolveStatus::kOptimum) return std::nullopt;
  return s.assignment;
}

}  // namespace lmt
