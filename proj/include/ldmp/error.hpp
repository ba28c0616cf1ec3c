#pragma once

#include <stdexcept>
#include <string>

namespace ldmp {

/// Raised when arguments violate an operation's preconditions
/// (arity mismatch, out-of-range index, incompatible configuration).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a metric is requested where it has no meaning,
/// e.g. alignment when recommendation states do not name actions.
class UndefinedMetric : public std::domain_error {
 public:
  explicit UndefinedMetric(const std::string& what) : std::domain_error(what) {}
};

}  // namespace ldmp
