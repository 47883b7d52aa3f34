#pragma once

#include <stdexcept>
#include <string>

namespace bregman {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a kernel or operation.
struct DomainError : Error {
  using Error::Error;
};

// Value outside the range of an invertible map (e.g. the dual of phi').
struct RangeError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Structural requirement violated while building a problem object.
struct ConstructionError : Error {
  using Error::Error;
};

// An iterative solver failed or exceeded its iteration cap.
struct SolverError : Error {
  using Error::Error;
};

struct UnknownInstanceError : Error {
  using Error::Error;
};

// (kernel, constraint, surrogate) triple outside the supported matrix.
struct UnsupportedCombinationError : Error {
  using Error::Error;
};

// Frozen boundary coordinates leave an empty reduced feasible set.
struct DegenerateReductionError : Error {
  using Error::Error;
};

struct UnderflowError : Error {
  using Error::Error;
};

struct TooLargeError : Error {
  using Error::Error;
};

struct NonCompactError : Error {
  using Error::Error;
};

// Caller-asserted precondition (e.g. convexity flag) not satisfied.
struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace bregman
