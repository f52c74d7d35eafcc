#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lmt/learner.hpp"
#include "lmt/problem.hpp"
#include "lmt/solver.hpp"

// Text formats. Everything is an s-expression with ';' line comments.
//
// Problem file:
//   (declare-bool NAME)
//   (declare-real NAME LO HI)
//   (assert FORMULA)
//   (assert-soft FORMULA :id ID :weight W :cost bool|linear [:scale S])
//   (evidence (= NAME VALUE) ...)
// Formulas use and, or, not, =>, iff and the relations < <= = >= > distinct
// over terms built from +, -, * (by a constant) and / (by a constant).
//
// Dataset file:   (example (given (= NAME VALUE) ...) (gold (= NAME VALUE) ...))
// Predictions:    (prediction (= NAME VALUE) ...)
// Model file:     #C=..., #eps=..., #tau=..., then "ID WEIGHT" lines sorted by id.
//
// Numbers are integers, decimals or p/q, optionally negative; rationals are
// always printed exactly.

namespace lmt {

// Throws ParseError (with line/column), SortError, MissingBounds or
// DuplicateId.
Problem parse_problem(std::string_view text);
std::string print_problem(const Problem& problem);

std::vector<Example> parse_dataset(std::string_view text, const Problem& problem);
// Without a problem, names are not checked and sorts follow the literals.
std::vector<Example> parse_dataset(std::string_view text);
std::string print_dataset(std::span<const Example> examples);

std::vector<Assignment> parse_predictions(std::string_view text, const Problem& problem);
std::vector<Assignment> parse_predictions(std::string_view text);
std::string print_predictions(std::span<const Assignment> predictions);

// Weights come back in the problem's soft-constraint order; every id must
// be known and present exactly once.
ModelWeights parse_model(std::string_view text, const Problem& problem);
std::string print_model(const ModelWeights& model, const Problem& problem);

// "status ...", "objective ...", then one "(= NAME VALUE)" per declared
// variable in declaration order.
std::string print_solution(const Solution& solution, const Problem& problem);

std::string print_double(double value);

}  // namespace lmt
