#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmt/learner.hpp"
#include "lmt/problem.hpp"

namespace lmt {

// ----- interval temporal logic -----

// An activity occupying [start, end]; both are Real variables named
// "<name>.start" and "<name>.end".
struct Interval {
  std::string name;

  std::string start() const { return name + ".start"; }
  std::string end() const { return name + ".end"; }
  bool operator==(const Interval&) const = default;
};

enum class ItlKind { kBefore, kAfter, kOverlaps, kDuring, kEqual };

std::string_view to_string(ItlKind kind);
ItlKind parse_itl_kind(std::string_view text);  // throws std::invalid_argument

struct ItlRelation {
  ItlKind kind = ItlKind::kBefore;
  Interval a;
  Interval b;
  std::optional<Rational> weight;  // empty for a hard relation
};

// The conjuncts of the relation as strict/equality atoms over the endpoints.
// Throws std::invalid_argument when a == b or the kind is out of range.
std::vector<Formula> itl_compile(const ItlRelation& relation);

// ----- generators -----

struct Dataset {
  Problem problem;
  std::vector<Example> examples;
  std::vector<Rational> true_weights;  // in soft-constraint order
};

struct ActivityConfig {
  std::size_t activities = 4;
  std::size_t itl_softs = 6;
  std::size_t examples = 50;
  Rational horizon = 14400;  // seconds
  Rational noise = 300;      // observed starts move by at most this much
  // Appended after the generated softs, over the "<activity>.start/.end"
  // variables; their weights are taken as the hidden true weights.
  std::vector<SoftConstraint> extra_soft;
};

// Soft ITL relations (Boolean cost) plus one duration soft per activity
// (end - start = d, linear cost per 10 minutes). A reference schedule is solved
// from a random start of the first activity; each example observes that
// start and a random subset of the others, perturbed by bounded noise. The
// gold output is the optimal completion under the hidden weights. Throws
// GenerationError or std::invalid_argument.
Dataset gen_activity_dataset(const ActivityConfig& config, std::uint64_t seed);

struct HousingConfig {
  std::size_t locations = 4;
  std::size_t examples = 50;
};

// Each example offers `locations` candidates (evidence: price, distance,
// crime, transit, garden, parking). The output selects exactly one and copies
// its attributes into the derived features that the six soft constraints
// judge. Golds are unique optima; examples with ties are redrawn.
Dataset gen_housing_dataset(const HousingConfig& config, std::uint64_t seed);

// ----- evaluation -----

struct Metrics {
  std::size_t examples = 0;
  Rational mean_hamming = 0;
  Rational bool_accuracy = 1;   // 1 when there are no Boolean outputs
  Rational mean_abs_error = 0;  // 0 when there are no Real outputs
  Rational exact_recovery = 0;
};

// Throws DomainError on a length mismatch, on empty lists, or when a
// prediction does not cover its gold's variables.
Metrics evaluate_predictions(std::span<const Assignment> predicted, std::span<const Assignment> gold,
                             const Rational& tau = 0);

}  // namespace lmt
