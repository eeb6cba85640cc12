#pragma once

#include "psidyn/field.hpp"

namespace psidyn {

// Forward transform with the symmetric continuous convention:
//
//   v(xi_m) = dx^d (2 pi)^{-d/2} sum_j e^{-i xi_m . x_j} f(x_j)
//
// evaluated exactly on the centered lattices via an FFT. A plain FFT indexes
// both lattices from 0; recentring both sides multiplies row j by (-1)^{sum
// j_a}, row m by (-1)^{sum m_a}, and the whole array by (-1)^{n/2} per axis,
// which is what the implementation does instead of shuffling memory.
//
// Input must live on the physical side and carry no overflow-masked modes; a
// nonzero log_shift rides along unchanged (the transform is linear).
Field forward_transform(const Field& f);

// Inverse transform, kernel e^{+i x . xi} with prefactor dxi^d (2 pi)^{-d/2}.
// Round trips compose to the identity exactly up to rounding because
// dx * dxi * n = 2 pi.
Field inverse_transform(const Field& v);

} // namespace psidyn
