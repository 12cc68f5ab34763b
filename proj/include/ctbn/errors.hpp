#ifndef CTBN_ERRORS_HPP
#define CTBN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctbn {

/// Base of all toolkit errors. `name()` is the stable identifier
/// (e.g. "RowSumNonZero") that CLI messages and tests match on.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Invalid values, dimensions, or parameters. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or internally inconsistent input data. CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A broken internal guarantee. CLI exit code 4.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctbn

#endif  // CTBN_ERRORS_HPP
