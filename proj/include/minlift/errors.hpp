#pragma once

#include <stdexcept>

namespace minlift {

// Base class for everything the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside the declared validity disk, or a nonfinite result.
struct DomainError : Error {
  using Error::Error;
};

// A quotient denominator (or h') dropped below the pole guard threshold.
struct PoleError : Error {
  using Error::Error;
};

// Catalog lookup with a name that is not one of the six entries.
struct UnknownName : Error {
  using Error::Error;
};

// combine()/lift_family() endpoints whose dilatations differ beyond tolerance.
struct DilatationMismatch : Error {
  using Error::Error;
};

// Boundary polyline with coincident consecutive samples.
struct DegenerateCurve : Error {
  using Error::Error;
};

// File write or read failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace minlift
