#pragma once

#include <stdexcept>
#include <string>

namespace mispar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoSignChange : public Error {
 public:
  using Error::Error;
};

class MaxIterExceeded : public Error {
 public:
  using Error::Error;
};

/// A quadrature node (or other evaluation) produced inf/nan.
class NonFinite : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A self-consistent solve did not settle; the message carries the bracket diagnostics.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

class BracketFailure : public Error {
 public:
  using Error::Error;
};

/// No perfect-recovery window: alpha <= alpha_c(rho).
class NoWindow : public Error {
 public:
  using Error::Error;
};

class NumericalRankFailure : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace mispar
