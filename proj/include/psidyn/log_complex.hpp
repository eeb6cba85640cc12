#pragma once

#include <complex>
#include <limits>

#include "psidyn/errors.hpp"

namespace psidyn {

// A nonzero complex number stored as (log magnitude, phase). The propagator
// multiplier exp(I) with I = integral of the symbol can have |Re I| in the
// tens of thousands, far past double range, so it is never materialized
// until a consumer explicitly asks and the guard below allows it.
//
// Phase is kept wrapped to (-pi, pi]. Zero is represented by log_mag =
// -infinity with phase 0.
struct LogComplex {
  double log_mag = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  // exp(e) for a plain complex exponent: log_mag = Re e, phase = wrap(Im e).
  static LogComplex from_exponent(std::complex<double> e);

  // Exact conversion of an ordinary complex value.
  static LogComplex from_value(std::complex<double> z);

  bool is_zero() const;

  // Safe to hand to materialize(). The guard 700 < log(DBL_MAX) ~ 709.78
  // leaves headroom for downstream sums and differences.
  bool materializable() const { return log_mag < 700.0; }

  // exp(log_mag) * e^{i phase}; throws MagnitudeOverflow past the guard.
  std::complex<double> materialize() const;

  // Stored value relative to a caller-chosen shift: exp(log_mag - shift) *
  // e^{i phase}. Used to pack strongly grown fields into doubles.
  std::complex<double> materialize_shifted(double shift) const;

  LogComplex operator*(const LogComplex& o) const;
};

// Wrap an angle to (-pi, pi].
double wrap_phase(double a);

// Running sum of LogComplex terms without leaving log scale. The accumulator
// keeps a reference exponent equal to the largest term magnitude seen so
// far and stores the mantissa sum relative to it, the complex analogue of
// streaming log-sum-exp. Adding terms in a fixed order is deterministic.
class LogComplexSum {
public:
  void add(const LogComplex& term);
  // term scaled by an ordinary complex coefficient (quadrature weight, data
  // value). A zero coefficient contributes nothing.
  void add_scaled(const LogComplex& term, std::complex<double> coeff);

  LogComplex value() const;

private:
  double ref_ = -std::numeric_limits<double>::infinity();
  std::complex<double> mantissa_{0.0, 0.0};
};

} // namespace psidyn
