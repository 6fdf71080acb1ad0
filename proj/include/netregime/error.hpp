#pragma once

#include <stdexcept>
#include <string>

namespace netregime {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Precondition violated by the caller (bad count, out-of-range parameter).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// A random draw that cannot be evaluated: coincident nodes, an empty
/// half of the network, a slab without an open crossing.
class DegenerateInstance : public Error {
 public:
  explicit DegenerateInstance(const std::string& msg) : Error(msg) {}
};

/// Operating point outside the range where a scheme or formula is defined.
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& msg) : Error(msg) {}
};

/// Internal consistency check failed. Should never fire on valid input.
class Defect : public Error {
 public:
  explicit Defect(const std::string& msg) : Error(msg) {}
};

}  // namespace netregime
