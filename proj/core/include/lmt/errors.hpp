#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class SortError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class FormulaNotLinearCostable : public Error {
 public:
  using Error::Error;
};

class MixedCostKind : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class TrainingDataInfeasible : public Error {
 public:
  TrainingDataInfeasible(std::size_t example, const std::string& what)
      : Error("example " + std::to_string(example) + ": " + what), example_(example) {}
  std::size_t example() const { return example_; }

 private:
  std::size_t example_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// Text-format errors. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class MissingBounds : public ParseError {
 public:
  using ParseError::ParseError;
};

class DuplicateId : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace lmt
