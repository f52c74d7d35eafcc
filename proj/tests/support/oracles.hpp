#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmt/learner.hpp"
#include "lmt/lra.hpp"
#include "lmt/problem.hpp"

namespace lmt::testing {

// Small deterministic helpers on top of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1)); }
  // p/q with |p| <= range*q and q in [1, max_den].
  Rational rational(int range, int max_den = 4);

 private:
  std::mt19937_64 engine_;
};

struct InstanceShape {
  int max_booleans = 8;
  int max_reals = 3;
  int max_formulas = 10;
  int max_hard = 2;
  int box = 10;  // reals range over [-box, box]
};

// Boolean-cost instance: random formulas over Booleans and linear atoms with
// small integer coefficients. Weights are integers in [1, 5].
Problem random_maxsmt_instance(Rng& rng, const InstanceShape& shape = {});

// Instance whose minimum is always attained: up to two reals and two
// Booleans, hard formulas built from non-strict atoms, linear softs over
// arbitrary atoms and Boolean softs with closed satisfying sets.
Problem random_omt_instance(Rng& rng);

// Boolean-output learning instance: up to ten outputs o0.., inputs i0 and
// i1, an optional hard formula and one to six Boolean-cost softs.
std::pair<Problem, Example> random_separation_instance(Rng& rng);

// Minimum total cost over all worlds satisfying the hard formulas, by
// enumerating the sign pattern of every distinct atom (pruned with LinSystem
// feasibility) and then every Boolean assignment. nullopt when infeasible.
std::optional<Rational> brute_force_maxsmt(const Problem& problem);

// Minimum total cost by evaluating every pairwise intersection of atom, hard
// and box boundary lines that satisfies the hard formulas. At most two free
// reals; Booleans are enumerated.
std::optional<Rational> vertex_enumeration_omt(const Problem& problem);

// 2-variable LP: minimum of `objective` over the system, from the vertices
// of the constraint and box lines. Strict bounds are treated as closed, so
// the result is the infimum.
std::optional<Rational> vertex_enumeration_lp(const LinExpr& objective, const LinSystem& system);

// Output worlds over the Boolean outputs of `example.gold` that satisfy the
// hard formulas, scanned in lexicographic order (first output most
// significant, false before true); the first minimizer of w.psi - loss.
struct BruteSeparation {
  Assignment output;
  Rational value;  // w . psi - loss
  Rational loss;
};
std::optional<BruteSeparation> brute_force_separation(std::span<const Rational> weights,
                                                      const Problem& problem, const Example& example);

// A total world over the declared variables; reals are drawn from their
// boxes with small denominators so that atom boundaries are hit often.
Assignment random_world(Rng& rng, const Problem& problem);

// Every hard formula holds and every evidence value is kept.
bool satisfies_hard(const Problem& problem, const Assignment& world);

}  // namespace lmt::testing
