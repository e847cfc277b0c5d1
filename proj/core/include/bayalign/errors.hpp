#pragma once

#include <stdexcept>
#include <string>

namespace bayalign {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (PDB, FASTA, substitution data).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The requested chain has no usable C-alpha atoms.
class EmptyChainError : public Error {
 public:
  using Error::Error;
};

/// Fewer than three points, or a rank-deficient configuration.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Enumeration refused because the instance is too large.
class RefusalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace bayalign
