// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dsa {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical input (zero displacement, nonpositive size, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Violated operation precondition (near-field test point, bad dimensions).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A geometry builder produced coincident or otherwise invalid elements.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Zss + Z_S is numerically singular for the given loads.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// Re{Za} lost positive semidefiniteness or radiated power is not positive.
class ModelViolation : public Error {
 public:
  using Error::Error;
};

/// Matrix rank below what an operation needs.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsa
