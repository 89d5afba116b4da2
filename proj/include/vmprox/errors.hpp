#ifndef VMPROX_ERRORS_HPP
#define VMPROX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vmprox {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed LIBSVM input. `line()` is 1-based; 0 when the error is not tied
/// to a particular line (empty input, unreadable file).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(std::size_t row)
      : Error("row " + std::to_string(row) +
              " has zero norm and lambda2 = 0; smoothness constant would be 0"),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class DegeneratePairError : public Error {
 public:
  DegeneratePairError() : Error("secant pair has y = 0") {}
};

class NonpositiveCurvatureError : public Error {
 public:
  NonpositiveCurvatureError() : Error("secant pair has s^T y <= 0") {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error("diverged in epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class RateHypothesisError : public Error {
 public:
  using Error::Error;
};

class MaxIterationsError : public Error {
 public:
  using Error::Error;
};

class PathExplosionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vmprox

#endif  // VMPROX_ERRORS_HPP
