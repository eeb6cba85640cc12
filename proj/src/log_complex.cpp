#include "psidyn/log_complex.hpp"

#include <cmath>
#include <string>

namespace psidyn {

double wrap_phase(double a) {
  // remainder() lands in [-pi, pi]; move -pi to +pi for the half-open branch.
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w = M_PI;
  return w;
}

LogComplex LogComplex::from_exponent(std::complex<double> e) {
  LogComplex z;
  z.log_mag = e.real();
  z.phase = wrap_phase(e.imag());
  return z;
}

LogComplex LogComplex::from_value(std::complex<double> v) {
  LogComplex z;
  double m = std::abs(v);
  if (m == 0.0) return z;
  z.log_mag = std::log(m);
  z.phase = std::arg(v); // already in (-pi, pi]
  return z;
}

bool LogComplex::is_zero() const { return std::isinf(log_mag) && log_mag < 0; }

std::complex<double> LogComplex::materialize() const {
  if (!materializable()) {
    throw MagnitudeOverflow("log-scale value with log magnitude " +
                            std::to_string(log_mag) +
                            " exceeds the materialization guard 700");
  }
  return materialize_shifted(0.0);
}

std::complex<double> LogComplex::materialize_shifted(double shift) const {
  if (is_zero()) return {0.0, 0.0};
  double m = std::exp(log_mag - shift);
  return {m * std::cos(phase), m * std::sin(phase)};
}

LogComplex LogComplex::operator*(const LogComplex& o) const {
  if (is_zero() || o.is_zero()) return LogComplex{};
  LogComplex z;
  z.log_mag = log_mag + o.log_mag;
  z.phase = wrap_phase(phase + o.phase);
  return z;
}

void LogComplexSum::add(const LogComplex& term) {
  add_scaled(term, {1.0, 0.0});
}

void LogComplexSum::add_scaled(const LogComplex& term,
                               std::complex<double> coeff) {
  if (term.is_zero() || (coeff.real() == 0.0 && coeff.imag() == 0.0)) return;
  LogComplex t = term * LogComplex::from_value(coeff);
  if (t.log_mag <= ref_) {
    mantissa_ += t.materialize_shifted(ref_);
    return;
  }
  // New dominant term: rescale the partial sum to the new reference.
  if (std::isfinite(ref_)) mantissa_ *= std::exp(ref_ - t.log_mag);
  ref_ = t.log_mag;
  mantissa_ += t.materialize_shifted(ref_);
}

LogComplex LogComplexSum::value() const {
  if (!std::isfinite(ref_)) return LogComplex{};
  double m = std::abs(mantissa_);
  if (m == 0.0) return LogComplex{};
  LogComplex z;
  z.log_mag = ref_ + std::log(m);
  z.phase = std::arg(mantissa_);
  return z;
}

} // namespace psidyn
