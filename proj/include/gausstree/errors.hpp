#pragma once

#include <stdexcept>
#include <string>

namespace gausstree {

// Base class for all domain errors raised by this library. The CLI maps
// these to exit code 1; anything else is a bug.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotATree : Error {
  using Error::Error;
};
struct NodeOutOfRange : Error {
  using Error::Error;
};
struct InvalidCorrelation : Error {
  using Error::Error;
};
struct CorrelationOutOfRange : Error {
  using Error::Error;
};
struct NotTreeMarginalizable : Error {
  using Error::Error;
};
struct DegenerateVariance : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct DegenerateDenominator : Error {
  using Error::Error;
};
struct SolverDiverged : Error {
  using Error::Error;
};
struct ConstraintInfeasible : Error {
  using Error::Error;
};
struct OddDimension : Error {
  using Error::Error;
};
struct CorrelationTooLarge : Error {
  using Error::Error;
};
struct GammaOutOfRange : Error {
  using Error::Error;
};
struct BadInput : Error {
  using Error::Error;
};

}  // namespace gausstree
