#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lmt/problem.hpp"
#include "lmt/solver.hpp"

namespace lmt {

// One training pair: evidence x_i and the gold output y_i. Together they
// cover every variable of the problem.
struct Example {
  Assignment evidence;
  Assignment gold;

  bool operator==(const Example&) const = default;
};

// Copy of `problem` with the soft weights replaced.
Problem with_weights(const Problem& problem, std::span<const Rational> weights);

// The minimum-cost completion of `evidence`, restricted to the non-evidence
// variables. Throws InfeasibleError when the hard formulas cannot hold.
Assignment infer(std::span<const Rational> weights, const Problem& problem,
                 const Assignment& evidence, const SolverOptions& options = {});

// Number of output variables on which `gold` and `predicted` disagree; a
// Real counts when the values differ by more than tau. Throws DomainError
// when the two do not cover the same variables.
Rational hamming_loss(const Assignment& gold, const Assignment& predicted, const Rational& tau = 0);

struct Separation {
  Assignment output;  // y'
  Rational loss;      // hamming_loss(gold, y')
  FeatureVector psi;  // feature_map(soft, evidence + y')
};

// Loss-augmented inference: argmin over y' of w.psi(x_i, y') - loss(y_i, y'),
// solved as one OMT call with an extra unit-weight soft constraint per output
// variable that is violated exactly when y' agrees with the gold value.
Separation separation_oracle(std::span<const Rational> weights, const Problem& problem,
                             const Example& example, const Rational& tau = 0,
                             const SolverOptions& options = {});

// Cutting plane for example i: w . delta_psi >= loss - xi_i, with
// delta_psi = psi(x_i, y') - psi(x_i, y_i) in cost convention.
struct WorkingConstraint {
  std::size_t example = 0;
  Assignment output;
  FeatureVector delta_psi;
  Rational loss;
};

using WorkingSet = std::vector<WorkingConstraint>;

struct QpSolution {
  std::vector<double> weights;  // projected onto w >= 0
  std::vector<double> slacks;   // one per example
  double primal = 0;
  double dual = 0;
  double gap = 0;
  std::size_t updates = 0;
  std::vector<double> alpha;  // dual variables, reusable as a warm start
};

// min 1/2 |w|^2 + C/n sum_i xi_i  s.t. the working-set rows, xi >= 0, w >= 0,
// by dual coordinate ascent down to a KKT violation of 1e-9. `dimension` is
// |w|; `warm_start` may hold duals for a prefix of the rows.
QpSolution solve_reduced_qp(const WorkingSet& working_set, double c, std::size_t n,
                            std::size_t dimension, std::span<const double> warm_start = {});

// xi_i = max(0, max over rows of example i of loss - w . delta_psi), exact.
std::vector<Rational> working_set_slacks(const WorkingSet& working_set,
                                         std::span<const Rational> weights, std::size_t n);

struct TrainingOptions {
  double c = 1;
  double epsilon = 1e-3;
  Rational tau = 0;
  std::size_t max_rounds = 500;
  SolverOptions solver;
};

struct TrainingRound {
  std::size_t round = 0;
  std::size_t added = 0;
  std::size_t working_set_size = 0;
  double qp_objective = 0;
  double qp_gap = 0;
};

struct ModelWeights {
  std::vector<Rational> weights;
  double c = 0;
  double epsilon = 0;
  Rational tau = 0;
};

struct TrainingResult {
  ModelWeights model;
  WorkingSet working_set;
  std::vector<TrainingRound> log;
  bool converged = false;
};

// n-slack cutting-plane training: each round runs the separation oracle on
// every example, adds the constraints violated by more than xi_i + epsilon,
// and re-solves the reduced QP, until a round adds nothing. Weights are
// rounded to denominator 10^6 after each QP solve.
TrainingResult train(const Problem& problem, std::span<const Example> examples,
                     const TrainingOptions& options);

}  // namespace lmt
