#pragma once

#include <stdexcept>
#include <string>

namespace fuzzysched {

// Base class for all errors raised by the library. Carries a message only;
// callers that need to branch catch the concrete type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input data violates a documented invariant (bad parameters, malformed
// documents, duplicate ids, ...).
struct ValidationError : Error {
  using Error::Error;
};

// No temporal clause found in an instruction.
struct NoTemporalModifier : Error {
  using Error::Error;
};

// More than one temporal clause found; reported, not resolved.
struct AmbiguousTime : Error {
  using Error::Error;
};

// The summed skill durations cannot fit into the scheduling interval.
struct NoFeasibleSchedule : Error {
  using Error::Error;
};

// k^n exceeds the exhaustive-search candidate guard.
struct SearchSpaceTooLarge : Error {
  using Error::Error;
};

// A sampled function with all-zero mass cannot be read as a density.
struct ZeroMass : Error {
  using Error::Error;
};

// A lookup (instruction tag, group filter, ...) matched nothing.
struct NotFound : Error {
  using Error::Error;
};

// Fit target is zero everywhere.
struct AllZeroTarget : Error {
  using Error::Error;
};

// Residual evaluated to NaN/inf at the initial point.
struct NonFiniteResidual : Error {
  using Error::Error;
};

}  // namespace fuzzysched
