#pragma once

#include <stdexcept>
#include <string>

namespace translocal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (wrong space, bad argument).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured point, horizon or enumeration cap.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t cap)
      : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// An orbit landed exactly on a point where the derivative is undefined.
class SingularOrbit : public Error {
 public:
  using Error::Error;
};

/// A Kraft-type equation has no positive root.
class NoPositiveRoot : public Error {
 public:
  using Error::Error;
};

/// The s-grid handed to a critical-exponent search does not bracket the transition.
class Unbracketed : public Error {
 public:
  using Error::Error;
};

/// A configuration file or identifier could not be interpreted.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace translocal
