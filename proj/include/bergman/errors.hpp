#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Argument lengths disagree with the dimension of the domain they are used with.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A point that must lie strictly inside a domain does not.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form kernel evaluated where its denominator vanishes.
class SingularInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Local inverses requested at a critical value of a power covering.
class BranchPointError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A requested table would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace bergman
