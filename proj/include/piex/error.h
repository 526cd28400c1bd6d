#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace piex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data failed validation. Carries every violation found, not just
/// the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string> &violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

/// The classifier could not produce a score (timeout, malformed response,
/// crashed plugin, out-of-range score).
class ScoringError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (node count, extension count) was exceeded.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace piex
