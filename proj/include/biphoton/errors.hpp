#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Raised when an input violates an operation's precondition. The CLI maps
// every PreconditionError to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotUnitary : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotNormalized : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InvalidDensity : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class UnknownName : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InvalidP : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class OutOfDomain : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InvalidQuintuplet : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class RankDeficient : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotBracketed : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File and stream failures; exit code 3 in the CLI.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
