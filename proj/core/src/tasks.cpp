#include "lmt/tasks.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "lmt/errors.hpp"

namespace lmt {

std::string_view to_string(ItlKind kind) {
  switch (kind) {
    case ItlKind::kBefore:
      return "before";
    case ItlKind::kAfter:
      return "after";
    case ItlKind::kOverlaps:
      return "overlaps";
    case ItlKind::kDuring:
      return "during";
    case ItlKind::kEqual:
      return "equal";
  }
  throw std::invalid_argument("unknown ITL relation");
}

ItlKind parse_itl_kind(std::string_view text) {
  for (ItlKind k : {ItlKind::kBefore, ItlKind::kAfter, ItlKind::kOverlaps, ItlKind::kDuring, ItlKind::kEqual}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown ITL relation '" + std::string(text) + "'");
}

namespace {

Formula lt(const std::string& x, const std::string& y) {
  return Formula::compare(LinExpr::variable(x), Relop::kLt, LinExpr::variable(y));
}

Formula eq(const std::string& x, const std::string& y) {
  return Formula::compare(LinExpr::variable(x), Relop::kEq, LinExpr::variable(y));
}

}  // namespace

std::vector<Formula> itl_compile(const ItlRelation& r) {
  if (r.a == r.b) throw std::invalid_argument("ITL relation over a single interval '" + r.a.name + "'");
  const Interval& a = r.a;
  const Interval& b = r.b;
  switch (r.kind) {
    case ItlKind::kBefore:
      return {lt(a.end(), b.start())};
    case ItlKind::kAfter:
      return itl_compile({ItlKind::kBefore, b, a, r.weight});
    case ItlKind::kOverlaps:
      return {lt(a.start(), b.start()), lt(b.start(), a.end()), lt(a.end(), b.end())};
    case ItlKind::kDuring:
      return {lt(b.start(), a.start()), lt(a.end(), b.end())};
    case ItlKind::kEqual:
      return {eq(a.start(), b.start()), eq(a.end(), b.end())};
  }
  throw std::invalid_argument("unknown ITL relation");
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t index(std::uint64_t n) { return rng_() % n; }
  bool coin() { return (rng_() >> 17) & 1; }
  // lo + (hi - lo) * k / steps for a uniform k in [0, steps].
  Rational grid(const Rational& lo, const Rational& hi, std::uint64_t steps) {
    Rational k(static_cast<unsigned long>(index(steps + 1)));
    return Rational(lo + (hi - lo) * k / Rational(static_cast<unsigned long>(steps)));
  }
  Rational half_steps(unsigned lo, unsigned hi) {  // k/2 for k in [lo, hi]
    Rational r(static_cast<unsigned long>(lo + index(hi - lo + 1)), 2);
    r.canonicalize();
    return r;
  }
  Rational hundredths(unsigned lo, unsigned hi) {  // k/100 for k in [lo, hi]
    Rational r(static_cast<unsigned long>(lo + index(hi - lo + 1)), 100);
    r.canonicalize();
    return r;
  }

 private:
  std::mt19937_64 rng_;
};

void require_feasible(const Problem& problem) {
  if (!check_sat(problem.hard, problem.variables)) throw GenerationError("hard template is infeasible");
}

VariableDecl real(std::string name, Rational lo, Rational hi) {
  return {std::move(name), Sort::kRational, std::move(lo), std::move(hi)};
}

VariableDecl boolean(std::string name) { return {std::move(name), Sort::kBool, 0, 0}; }

constexpr int kMaxRetries = 200;

}  // namespace

// ----- activity -----

Dataset gen_activity_dataset(const ActivityConfig& config, std::uint64_t seed) {
  if (config.activities < 2) throw std::invalid_argument("need at least two activities");
  if (config.horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (config.noise < 0) throw std::invalid_argument("noise must be nonnegative");
  Sampler rng(seed);
  static const char* kNames[] = {"wake", "breakfast", "shower", "tv", "cook", "read", "walk", "nap"};
  std::vector<Interval> acts;
  for (std::size_t i = 0; i < config.activities; ++i) {
    acts.push_back({i < std::size(kNames) ? kNames[i] : "act" + std::to_string(i)});
  }
  const std::size_t m = acts.size();
  const std::size_t max_pairs = m * (m - 1) * 5;
  if (config.itl_softs > max_pairs) throw std::invalid_argument("too many ITL soft constraints requested");

  Dataset out;
  Problem& p = out.problem;
  for (const Interval& a : acts) {
    p.variables.push_back(real(a.start(), 0, config.horizon));
    p.variables.push_back(real(a.end(), 0, config.horizon));
    p.hard.push_back(lt(a.start(), a.end()));
  }

  std::set<std::tuple<ItlKind, std::size_t, std::size_t>> used;
  auto add_itl = [&](ItlKind kind, std::size_t i, std::size_t j) {
    if (!used.insert({kind, i, j}).second) return false;
    ItlRelation r{kind, acts[i], acts[j], rng.hundredths(50, 500)};
    p.soft.push_back({"itl." + std::string(to_string(kind)) + "." + acts[i].name + "." + acts[j].name,
                      Formula::conjunction(itl_compile(r)), CostKind::kBoolean, *r.weight, 1});
    out.true_weights.push_back(*r.weight);
    return true;
  };
  for (std::size_t i = 0; i + 1 < m && p.soft.size() < config.itl_softs; ++i) {
    add_itl(ItlKind::kBefore, i, i + 1);
  }
  while (p.soft.size() < config.itl_softs) {
    std::size_t i = rng.index(m);
    std::size_t j = rng.index(m - 1);
    if (j >= i) ++j;
    add_itl(static_cast<ItlKind>(rng.index(5)), i, j);
  }
  const Rational unit(600);
  for (const Interval& a : acts) {
    Rational duration = rng.grid(600, 2700, 7);
    duration = std::min(duration, Rational(config.horizon / 2));
    LinExpr length = LinExpr::variable(a.end()) - LinExpr::variable(a.start());
    Rational w = rng.hundredths(50, 500);
    p.soft.push_back({"dur." + a.name, Formula::compare(length, Relop::kEq, LinExpr(duration)),
                      CostKind::kLinear, w, Rational(1 / unit)});
    out.true_weights.push_back(w);
  }
  for (const SoftConstraint& s : config.extra_soft) {
    p.soft.push_back(s);
    out.true_weights.push_back(s.weight);
  }
  p.validate();
  require_feasible(p);

  // Observed starts never fall so late that the interval cannot fit.
  const Rational latest_start = std::max(Rational(0), Rational(config.horizon - 60));
  for (std::size_t e = 0; e < config.examples; ++e) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxRetries && !done; ++attempt) {
      Assignment anchor;
      anchor.set_rational(acts[0].start(), rng.grid(0, Rational(config.horizon / 4), 60));
      Assignment reference;
      try {
        reference = infer(out.true_weights, p, anchor);
      } catch (const InfeasibleError&) {
        continue;
      }
      reference = reference.merged(anchor);
      Assignment evidence;
      for (std::size_t i = 0; i < m; ++i) {
        const bool observe = rng.coin();
        if (!observe && i != 0) continue;
        Rational t = reference.rational_value(acts[i].start());
        if (config.noise > 0) {
          const auto span = static_cast<std::uint64_t>(mpz_class(2 * config.noise).get_ui());
          t += Rational(static_cast<long>(rng.index(span + 1))) - config.noise;
        }
        t = std::clamp(t, Rational(0), latest_start);
        evidence.set_rational(acts[i].start(), t);
      }
      try {
        Assignment gold = infer(out.true_weights, p, evidence);
        out.examples.push_back({std::move(evidence), std::move(gold)});
        done = true;
      } catch (const InfeasibleError&) {
      }
    }
    if (!done) throw GenerationError("could not draw a feasible activity example");
  }
  return out;
}

// ----- housing -----

namespace {

struct Attribute {
  const char* name;
  Rational lo;
  Rational hi;
  std::uint64_t steps;
};

const std::vector<Attribute>& housing_attributes() {
  static const std::vector<Attribute> kAttributes = {
      {"price", 100, 1000, 90}, {"dist", 0, 30, 60}, {"crime", 0, 10, 20}, {"transit", 0, 10, 20}};
  return kAttributes;
}

std::string loc(std::size_t i, const char* attribute) {
  return "loc" + std::to_string(i) + "." + attribute;
}

std::string sel(std::size_t i) { return "sel" + std::to_string(i); }

}  // namespace

Dataset gen_housing_dataset(const HousingConfig& config, std::uint64_t seed) {
  if (config.locations < 2) throw std::invalid_argument("need at least two locations");
  Sampler rng(seed);
  const std::size_t n = config.locations;
  const auto& attrs = housing_attributes();

  Dataset out;
  Problem& p = out.problem;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Attribute& a : attrs) p.variables.push_back(real(loc(i, a.name), a.lo, a.hi));
    p.variables.push_back(boolean(loc(i, "garden")));
    p.variables.push_back(boolean(loc(i, "parking")));
  }
  for (std::size_t i = 0; i < n; ++i) p.variables.push_back(boolean(sel(i)));
  for (const Attribute& a : attrs) p.variables.push_back(real(a.name, a.lo, a.hi));
  p.variables.push_back(boolean("garden"));
  p.variables.push_back(boolean("parking"));

  std::vector<Formula> any;
  for (std::size_t i = 0; i < n; ++i) any.push_back(Formula::bool_var(sel(i)));
  p.hard.push_back(Formula::disjunction(any));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) p.hard.push_back(!(any[i] && any[j]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Formula> copy;
    for (const Attribute& a : attrs) copy.push_back(eq(a.name, loc(i, a.name)));
    for (const char* b : {"garden", "parking"}) {
      copy.push_back(Formula::iff(Formula::bool_var(b), Formula::bool_var(loc(i, b))));
    }
    p.hard.push_back(Formula::implies(any[i], Formula::conjunction(copy)));
  }

  auto at_most = [](const char* v, int c) {
    return Formula::compare(LinExpr::variable(v), Relop::kLe, LinExpr(Rational(c)));
  };
  p.soft = {
      {"budget", at_most("price", 500), CostKind::kLinear, 1, Rational(1, 100)},
      {"commute", at_most("dist", 10), CostKind::kLinear, 1, Rational(1, 5)},
      {"safety", at_most("crime", 4), CostKind::kLinear, 1, Rational(1, 2)},
      {"transit", Formula::compare(LinExpr::variable("transit"), Relop::kGe, LinExpr(Rational(6))),
       CostKind::kLinear, 1, Rational(1, 2)},
      {"garden", Formula::bool_var("garden"), CostKind::kBoolean, 1, 1},
      {"parking", Formula::bool_var("parking"), CostKind::kBoolean, 1, 1},
  };
  for (SoftConstraint& s : p.soft) {
    s.weight = rng.half_steps(1, 10);
    out.true_weights.push_back(s.weight);
  }
  p.validate();
  require_feasible(p);

  const Problem weighted = with_weights(p, out.true_weights);
  for (std::size_t e = 0; e < config.examples; ++e) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxRetries && !done; ++attempt) {
      Assignment evidence;
      for (std::size_t i = 0; i < n; ++i) {
        for (const Attribute& a : attrs) evidence.set_rational(loc(i, a.name), rng.grid(a.lo, a.hi, a.steps));
        evidence.set_bool(loc(i, "garden"), rng.coin());
        evidence.set_bool(loc(i, "parking"), rng.coin());
      }
      Problem q = weighted;
      q.evidence = evidence;
      Solution best = solve(q);
      if (best.status != SolveStatus::kOptimum) continue;
      std::size_t chosen = 0;
      while (!best.assignment.bool_value(sel(chosen))) ++chosen;
      q.hard.push_back(!Formula::bool_var(sel(chosen)));
      Solution runner_up = solve(q);
      if (runner_up.status == SolveStatus::kOptimum && runner_up.objective <= best.objective) continue;
      Assignment gold = infer(out.true_weights, p, evidence);
      out.examples.push_back({std::move(evidence), std::move(gold)});
      done = true;
    }
    if (!done) throw GenerationError("could not draw a housing example with a unique optimum");
  }
  return out;
}

// ----- evaluation -----

Metrics evaluate_predictions(std::span<const Assignment> predicted, std::span<const Assignment> gold,
                             const Rational& tau) {
  if (predicted.size() != gold.size()) {
    throw DomainError("got " + std::to_string(predicted.size()) + " predictions for " +
                      std::to_string(gold.size()) + " gold worlds");
  }
  if (gold.empty()) throw DomainError("nothing to evaluate");
  Metrics m;
  m.examples = gold.size();
  Rational hamming = 0;
  std::size_t bools = 0;
  std::size_t bools_right = 0;
  std::size_t reals = 0;
  Rational abs_error = 0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    hamming += hamming_loss(gold[i], predicted[i], tau);
    bool same = true;
    for (const auto& [name, g] : gold[i]) {
      const Value& pv = *predicted[i].find(name);
      if (const bool* gb = std::get_if<bool>(&g)) {
        ++bools;
        if (*gb == std::get<bool>(pv)) ++bools_right;
      } else {
        ++reals;
        abs_error += abs(Rational(std::get<Rational>(g) - std::get<Rational>(pv)));
      }
      same = same && g == pv;
    }
    if (same) ++exact;
  }
  const auto n = Rational(static_cast<unsigned long>(gold.size()));
  m.mean_hamming = hamming / n;
  if (bools > 0) m.bool_accuracy = Rational(static_cast<unsigned long>(bools_right), static_cast<unsigned long>(bools));
  if (reals > 0) m.mean_abs_error = abs_error / Rational(static_cast<unsigned long>(reals));
  m.exact_recovery = Rational(static_cast<unsigned long>(exact)) / n;
  m.bool_accuracy.canonicalize();
  return m;
}

}  // namespace lmt
