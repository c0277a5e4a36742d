#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

/// Base exception for contract violations and malformed inputs.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates a documented precondition (bad cardinality, invalid range,
/// degenerate geometry).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operation not permitted in the current state (e.g. grasp-phase update on a
/// static object).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration, dataset, or case file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsi
