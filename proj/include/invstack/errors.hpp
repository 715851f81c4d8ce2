#pragma once

#include <stdexcept>
#include <string>

namespace invstack {

// Raised for malformed inputs: bad dimensions, out-of-range parameters,
// violated preconditions. The CLI maps this family to exit code 2.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that happen on well-formed inputs.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class InfeasibleError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class UnboundedError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class NumericalError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// A response distribution has a zero where a logarithm is required, or an
// estimate puts mass where the reference distribution has none.
class SupportError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class InducibilityError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class RankRepairError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class IoError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace invstack
