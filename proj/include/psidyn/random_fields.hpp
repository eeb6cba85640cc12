#pragma once

#include <cstdint>

#include "psidyn/field.hpp"

namespace psidyn {

// Band-limited random frequency data for property tests. Coefficients are
// complex Gaussians damped by (1 + |xi|^2)^{-decay}, nonzero only for
// |xi| <= band_radius (absolute units).
//
// Draws walk the integer frequency cube inside the band in lexicographic
// order, two normal variates per in-band point, so two grids with the same
// extent share dxi and therefore receive identical coefficients: doubling n
// refines the lattice under the same continuum field, which is what the
// refinement trends compare.
struct SampleSpec {
  double band_radius = 0.0;
  double decay = 3.0;
  std::uint64_t seed = 0;
};

Field random_band_limited(GridPtr grid, const SampleSpec& spec);

} // namespace psidyn
