#pragma once

#include <stdexcept>
#include <string>

namespace psidyn {

// Root of the library's error hierarchy. Every throw below carries a
// human-readable message naming the offending value; callers that need to
// distinguish cases catch the concrete type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Grid construction with an odd or too-small mode count per axis.
class OddSize : public Error {
public:
  using Error::Error;
};

// Grid construction outside the supported dimensions {1, 2, 3}.
class BadDim : public Error {
public:
  using Error::Error;
};

// A field or sampled callable produced NaN or Inf where a finite value is
// required.
class NonFinite : public Error {
public:
  using Error::Error;
};

// Two fields that must share a lattice were built on different grids.
class GridMismatch : public Error {
public:
  using Error::Error;
};

// The logarithmic symbol family was evaluated where its inner symbol
// vanishes; the principal branch has no value there.
class ZeroArgument : public Error {
public:
  using Error::Error;
};

// Adaptive refinement hit its panel cap without meeting the tolerance.
class QuadratureDivergence : public Error {
public:
  using Error::Error;
};

// A log-scale value was asked to materialize as a plain complex number but
// its magnitude exceeds the double range guard.
class MagnitudeOverflow : public Error {
public:
  using Error::Error;
};

// A propagator kernel snapshot was requested although some multiplier modes
// cannot be represented as doubles.
class KernelOverflow : public Error {
public:
  using Error::Error;
};

// A ball radius R exceeds the largest frequency the lattice resolves.
class RadiusExceedsGrid : public Error {
public:
  using Error::Error;
};

// A weight function was non-positive at a sampled lattice point.
class WeightNotPositive : public Error {
public:
  using Error::Error;
};

// A test-function support radius does not fit strictly inside the lattice
// band.
class SupportExceedsGrid : public Error {
public:
  using Error::Error;
};

// A trajectory has too few snapshots for the requested residual quadrature.
class InsufficientTimes : public Error {
public:
  using Error::Error;
};

// Configuration file is malformed, fails the schema, or contains unknown
// keys. The message carries line/column where available.
class ConfigParse : public Error {
public:
  using Error::Error;
};

// Precondition violations that the contract does not give a dedicated type
// (bad interval order, mesh not containing a requested time, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

} // namespace psidyn
