#pragma once

#include <stdexcept>
#include <string>

namespace itersolve {

// Shape or argument problems: wrong dimensions, bad parameters, malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures that come from the numbers themselves. The CLI maps these to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(std::size_t step, const std::string& what)
      : NumericalError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ZeroDiagonalError : public NumericalError {
 public:
  explicit ZeroDiagonalError(std::size_t row)
      : NumericalError("zero diagonal entry in row " + std::to_string(row)), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DivergedError : public NumericalError {
 public:
  explicit DivergedError(std::size_t iteration)
      : NumericalError("diverged: iterate became non-finite or exceeded 1e150 at iteration " +
                       std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class NoConvergentMethodError : public NumericalError {
 public:
  NoConvergentMethodError()
      : NumericalError("no convergent stationary method: every spectral radius is >= 1") {}
};

// Input text that does not follow a file format; carries the 1-based line number.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : InvalidArgument("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace itersolve
