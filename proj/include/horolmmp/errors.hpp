#pragma once

#include <stdexcept>
#include <string>

namespace horo {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension mismatches at construction time.
struct DimensionError : Error {
  using Error::Error;
};

// Mathematical-domain failures: zero vectors, unbounded polytopes,
// divisors that are not ample, divisors that are not Q-Cartier, ...
struct DomainError : Error {
  using Error::Error;
};

// Malformed input documents.
struct ParseError : Error {
  using Error::Error;
};

// Violations of invariants that are supposed to be unreachable.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace horo
