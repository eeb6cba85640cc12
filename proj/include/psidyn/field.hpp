#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "psidyn/grid.hpp"

namespace psidyn {

using Complex = std::complex<double>;

// One scalar complex-valued function sampled on a lattice.
//
// The stored numbers represent exp(log_shift) * values[k]. For ordinary
// fields log_shift is 0 and overflow is empty. Solutions of strongly growing
// problems keep a positive shift so that the stored values stay inside
// double range; modes whose true magnitude is not representable even then
// are flagged in overflow (value stored as the capped stand-in exp(log m -
// shift) of its phase, never NaN) and every consumer must skip or count
// them, never silently mix them into norms.
struct Field {
  GridPtr grid;
  Side side = Side::Physical;
  std::vector<Complex> values;
  double log_shift = 0.0;
  std::vector<std::uint8_t> overflow;

  static Field zeros(GridPtr grid, Side side);

  std::size_t size() const { return values.size(); }

  bool masked(std::size_t k) const {
    return !overflow.empty() && overflow[k] != 0;
  }

  std::size_t overflow_count() const;

  // True stored value is plain (shift 0, no mask anywhere).
  bool plain() const { return log_shift == 0.0 && overflow_count() == 0; }
};

// Throws GridMismatch unless both fields share one lattice and side.
void require_same_lattice(const Field& a, const Field& b);

// Throws NonFinite if any stored value is NaN or Inf. The offending flat
// index is named in the message.
void require_finite(const Field& f, const char* context);

// Evaluate a callable on every lattice point of the requested side.
// Throws NonFinite if the callable returns NaN or Inf anywhere (e.g. a pole
// sitting on a lattice point).
Field sample(GridPtr grid, Side side,
             const std::function<Complex(const std::array<double, 3>&)>& fn);

// Lattice L_q norm with the side's cell volume as quadrature weight;
// q = infinity gives the lattice maximum. Masked modes are excluded.
double lattice_lq_norm(const Field& f, double q);

} // namespace psidyn
