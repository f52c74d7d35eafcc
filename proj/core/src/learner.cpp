#include "lmt/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lmt/errors.hpp"

namespace lmt {

Problem with_weights(const Problem& problem, std::span<const Rational> weights) {
  if (weights.size() != problem.soft.size()) {
    throw DimensionError("expected " + std::to_string(problem.soft.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  Problem out = problem;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0) throw DomainError("negative weight for '" + out.soft[j].id + "'");
    out.soft[j].weight = weights[j];
  }
  return out;
}

namespace {

std::vector<std::string> free_names(const Problem& problem, const Assignment& evidence) {
  std::vector<std::string> names;
  for (const VariableDecl& v : problem.variables) {
    if (!evidence.contains(v.name)) names.push_back(v.name);
  }
  return names;
}

}  // namespace

Assignment infer(std::span<const Rational> weights, const Problem& problem,
                 const Assignment& evidence, const SolverOptions& options) {
  Problem p = with_weights(problem, weights);
  p.evidence = evidence;
  Solution s = solve(p, options);
  if (s.status != SolveStatus::kOptimum) throw InfeasibleError("no world satisfies the hard formulas");
  return s.assignment.projected(free_names(problem, evidence));
}

Rational hamming_loss(const Assignment& gold, const Assignment& predicted, const Rational& tau) {
  if (gold.size() != predicted.size()) throw DomainError("output domains differ");
  Rational loss = 0;
  for (const auto& [name, g] : gold) {
    const Value* p = predicted.find(name);
    if (p == nullptr) throw DomainError("prediction lacks '" + name + "'");
    if (g.index() != p->index()) throw DomainError("sort mismatch on '" + name + "'");
    if (const bool* gb = std::get_if<bool>(&g)) {
      if (*gb != std::get<bool>(*p)) loss += 1;
    } else if (abs(Rational(std::get<Rational>(g) - std::get<Rational>(*p))) > tau) {
      loss += 1;
    }
  }
  return loss;
}

Separation separation_oracle(std::span<const Rational> weights, const Problem& problem,
                             const Example& example, const Rational& tau,
                             const SolverOptions& options) {
  Problem p = with_weights(problem, weights);
  p.evidence = example.evidence;
  std::vector<std::string> outputs;
  for (const VariableDecl& v : problem.variables) {
    const Value* g = example.gold.find(v.name);
    if (g == nullptr) continue;
    outputs.push_back(v.name);
    Formula disagree;
    if (const bool* gb = std::get_if<bool>(g)) {
      disagree = *gb ? Formula::negation(Formula::bool_var(v.name)) : Formula::bool_var(v.name);
    } else {
      const Rational& gr = std::get<Rational>(*g);
      LinExpr y = LinExpr::variable(v.name);
      if (tau == 0) {
        disagree = Formula::compare(y, Relop::kNe, LinExpr(gr));
      } else {
        disagree = Formula::compare(y, Relop::kGt, LinExpr(Rational(gr + tau))) ||
                   Formula::compare(y, Relop::kLt, LinExpr(Rational(gr - tau)));
      }
    }
    p.soft.push_back(SoftConstraint{"__loss." + v.name, disagree, CostKind::kBoolean, 1, 1});
  }
  Solution s = solve(p, options);
  if (s.status != SolveStatus::kOptimum) throw InfeasibleError("no world satisfies the hard formulas");
  Separation out;
  out.output = s.assignment.projected(outputs);
  out.loss = hamming_loss(example.gold, out.output, tau);
  out.psi = feature_map(problem.soft, example.evidence.merged(out.output));
  return out;
}

// ----- reduced QP -----

namespace {

// Maximizer over [0, room] of the dual along direction u, given its
// derivative slope0 > 0 at t = 0; w moves as max(v + t u, 0).
double line_search(const std::vector<double>& v, const std::vector<double>& u, double slope0,
                   double room) {
  // Breakpoints where a coordinate of v + t u changes sign.
  std::vector<std::pair<double, std::size_t>> kinks;
  double slope = slope0;  // derivative at the current t
  double curvature = 0;   // sum of u_j^2 over coordinates active just after t
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (u[j] == 0) continue;
    const bool active = v[j] > 0 || (v[j] == 0 && u[j] > 0);
    if (active) curvature += u[j] * u[j];
    const double cross = -v[j] / u[j];
    if (cross > 0) kinks.emplace_back(cross, j);
  }
  std::sort(kinks.begin(), kinks.end());
  double t = 0;
  for (const auto& [at, j] : kinks) {
    if (at > room) break;
    if (curvature > 0 && t + slope / curvature <= at) return t + slope / curvature;
    slope -= curvature * (at - t);
    t = at;
    if (u[j] > 0) {
      curvature += u[j] * u[j];
    } else {
      curvature -= u[j] * u[j];
    }
    curvature = std::max(curvature, 0.0);
    if (slope <= 0) return t;
  }
  if (curvature > 0) return std::min(room, t + slope / curvature);
  return room;
}

}  // namespace

QpSolution solve_reduced_qp(const WorkingSet& working_set, double c, std::size_t n,
                            std::size_t dimension, std::span<const double> warm_start) {
  if (c <= 0) throw DomainError("C must be positive");
  if (n == 0) throw DomainError("n must be positive");
  const std::size_t rows = working_set.size();
  const double cap = c / static_cast<double>(n);
  std::vector<std::vector<double>> a(rows, std::vector<double>(dimension, 0.0));
  std::vector<double> loss(rows);
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t k = 0; k < rows; ++k) {
    const WorkingConstraint& wc = working_set[k];
    if (wc.delta_psi.size() != dimension) throw DimensionError("working-set row has the wrong dimension");
    if (wc.example >= n) throw DomainError("working-set row names example out of range");
    for (std::size_t j = 0; j < dimension; ++j) a[k][j] = to_double(wc.delta_psi[j]);
    loss[k] = to_double(wc.loss);
    groups[wc.example].push_back(k);
  }

  // Duals: alpha_k >= 0 with sum over each example <= cap, plus nu >= 0 for
  // w >= 0. At any point w = v + nu with v = sum_k alpha_k a_k, and nu is
  // kept at its optimum max(0, -v).
  std::vector<double> alpha(rows, 0.0);
  for (std::size_t k = 0; k < std::min(rows, warm_start.size()); ++k) alpha[k] = std::max(0.0, warm_start[k]);
  // spare[i] is the dual mass of example i's null member (the gold output
  // itself), kept explicitly so that it can reach exactly zero.
  std::vector<double> spare(n, cap);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (std::size_t k : groups[i]) sum += alpha[k];
    if (sum > cap) {
      for (std::size_t k : groups[i]) alpha[k] *= cap / sum;
      sum = cap;
    }
    spare[i] = std::max(0.0, cap - sum);
  }
  std::vector<double> v(dimension, 0.0);
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t j = 0; j < dimension; ++j) v[j] += alpha[k] * a[k][j];
  }
  std::vector<double> w(dimension);
  auto refresh_w = [&] {
    for (std::size_t j = 0; j < dimension; ++j) w[j] = std::max(v[j], 0.0);
  };
  refresh_w();
  auto gradient = [&](std::size_t k) {
    double g = loss[k];
    for (std::size_t j = 0; j < dimension; ++j) g -= w[j] * a[k][j];
    return g;
  };

  constexpr double kTolerance = 1e-9;
  constexpr std::size_t kMaxUpdates = 20'000'000;
  constexpr std::size_t kNull = static_cast<std::size_t>(-1);
  QpSolution out;
  for (;;) {
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& group = groups[i];
      if (group.empty()) continue;
      const double null_alpha = spare[i];
      // The null member has zero row and zero loss, so its gradient is 0.
      std::size_t up = kNull;
      double up_g = 0;
      std::size_t down = null_alpha > 0 ? kNull : group.front();
      double down_g = null_alpha > 0 ? 0.0 : std::numeric_limits<double>::infinity();
      bool down_set = null_alpha > 0;
      for (std::size_t k : group) {
        const double g = gradient(k);
        if (g > up_g) {
          up_g = g;
          up = k;
        }
        if (alpha[k] > 0 && (!down_set || g < down_g)) {
          down_g = g;
          down = k;
          down_set = true;
        }
      }
      if (!down_set || up == down) continue;
      const double violation = up_g - down_g;
      worst = std::max(worst, violation);
      if (violation <= kTolerance) continue;
      // Move t from `down` to `up`, maximizing the dual along that line. The
      // dual is piecewise quadratic in t since w = max(v + t u, 0).
      std::vector<double> u(dimension);
      for (std::size_t j = 0; j < dimension; ++j) {
        u[j] = (up == kNull ? 0.0 : a[up][j]) - (down == kNull ? 0.0 : a[down][j]);
      }
      const double room = down == kNull ? null_alpha : alpha[down];
      const double t = line_search(v, u, violation, room);
      if (t <= 0) continue;
      if (up == kNull) {
        spare[i] += t;
      } else {
        alpha[up] += t;
      }
      double& from = down == kNull ? spare[i] : alpha[down];
      from = t >= room ? 0.0 : from - t;
      for (std::size_t j = 0; j < dimension; ++j) v[j] += t * u[j];
      refresh_w();
      ++out.updates;
    }
    if (worst <= kTolerance || out.updates >= kMaxUpdates) break;
  }

  out.weights = w;
  out.slacks.assign(n, 0.0);
  double sq = 0;
  for (double x : w) sq += x * x;
  double dual_linear = 0;
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t i = working_set[k].example;
    out.slacks[i] = std::max(out.slacks[i], gradient(k));
    dual_linear += alpha[k] * loss[k];
  }
  double slack_sum = 0;
  for (double s : out.slacks) slack_sum += s;
  out.primal = 0.5 * sq + cap * slack_sum;
  out.dual = dual_linear - 0.5 * sq;
  out.gap = out.primal - out.dual;
  out.alpha = std::move(alpha);
  return out;
}

std::vector<Rational> working_set_slacks(const WorkingSet& working_set,
                                         std::span<const Rational> weights, std::size_t n) {
  std::vector<Rational> xi(n, Rational(0));
  for (const WorkingConstraint& wc : working_set) {
    Rational excess = wc.loss - dot(weights, wc.delta_psi);
    if (excess > xi.at(wc.example)) xi[wc.example] = excess;
  }
  return xi;
}

// ----- cutting plane -----

TrainingResult train(const Problem& problem, std::span<const Example> examples,
                     const TrainingOptions& options) {
  if (examples.empty()) throw DomainError("training needs at least one example");
  if (!(options.c > 0)) throw DomainError("C must be positive");
  if (!(options.epsilon > 0)) throw DomainError("epsilon must be positive");
  problem.validate();
  const std::size_t n = examples.size();
  const std::size_t d = problem.soft.size();
  const Rational epsilon(options.epsilon);

  std::vector<FeatureVector> gold_psi;
  for (std::size_t i = 0; i < n; ++i) {
    const Assignment world = examples[i].evidence.merged(examples[i].gold);
    for (const VariableDecl& v : problem.variables) {
      if (!world.contains(v.name)) throw DomainError("example " + std::to_string(i) + " leaves '" + v.name + "' unset");
    }
    gold_psi.push_back(feature_map(problem.soft, world));
  }

  TrainingResult result;
  result.model.c = options.c;
  result.model.epsilon = options.epsilon;
  result.model.tau = options.tau;
  std::vector<Rational> w(d, Rational(0));
  std::vector<double> alpha;
  double previous_objective = 0;
  double previous_gap = 0;

  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    const std::vector<Rational> xi = working_set_slacks(result.working_set, w, n);
    std::size_t added = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Separation sep;
      try {
        sep = separation_oracle(w, problem, examples[i], options.tau, options.solver);
      } catch (const InfeasibleError& e) {
        throw TrainingDataInfeasible(i, e.what());
      }
      FeatureVector delta(d);
      for (std::size_t j = 0; j < d; ++j) delta[j] = sep.psi[j] - gold_psi[i][j];
      const Rational violation = sep.loss - dot(w, delta);
      if (violation <= xi[i] + epsilon) continue;
      const bool duplicate = std::any_of(
          result.working_set.begin(), result.working_set.end(),
          [&](const WorkingConstraint& wc) { return wc.example == i && wc.output == sep.output; });
      if (duplicate) continue;
      result.working_set.push_back({i, std::move(sep.output), std::move(delta), sep.loss});
      ++added;
    }
    if (added == 0) {
      result.converged = true;
      break;
    }
    QpSolution qp = solve_reduced_qp(result.working_set, options.c, n, d, alpha);
    alpha = qp.alpha;
    for (std::size_t j = 0; j < d; ++j) w[j] = round_to_denominator(qp.weights[j], 1'000'000);
    if (qp.primal + qp.gap + previous_gap + 1e-9 < previous_objective) {
      throw std::logic_error("reduced QP objective decreased between rounds");
    }
    previous_objective = qp.primal;
    previous_gap = qp.gap;
    result.log.push_back({round, added, result.working_set.size(), qp.primal, qp.gap});
  }
  result.model.weights = w;
  return result;
}

}  // namespace lmt
