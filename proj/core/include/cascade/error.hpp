#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Base class for every error raised by the cascade library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter (bad grid, snapshot out of range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A point was requested outside the domain of a grid function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller passed inputs that violate an operation's contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The requested level is not crossed on the grid.
class FrontNotFound : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit could not be carried out (too few points, ill-conditioned).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: quadrature did not converge, invariant broken, optimizer
/// could not bracket a minimum.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascade
