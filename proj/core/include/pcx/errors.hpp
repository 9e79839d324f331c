#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions, missing oracles, bad parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An oracle returned something its contract forbids (e.g. a non-finite
/// value from a finite-valued piece).
class OracleContractError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure, infeasible subproblem and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pcx
