#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace udiscrim {

/// Malformed or out-of-contract input (dimension mismatch, non-unitary, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructive request that cannot be met because the hypotheses are
/// indistinguishable (e.g. equal up to a global phase).
class NotDistinguishableError : public std::runtime_error {
 public:
  explicit NotDistinguishableError(const std::string& what,
                                   std::size_t first = 0,
                                   std::size_t second = 0)
      : std::runtime_error(what), first_(first), second_(second) {}

  /// 1-based positions of the offending pair, 0 when not applicable.
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

/// The requested strategy does not apply to the given hypotheses.
class StrategyInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Alice-side measurement search failed verification.
class NoBasisFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical routine did not converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace udiscrim
