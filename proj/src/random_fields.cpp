#include "psidyn/random_fields.hpp"

#include <cmath>
#include <random>

namespace psidyn {

namespace {

// Box-Muller on explicit 53-bit uniforms. The standard library's
// normal_distribution is implementation-defined, which would tie test
// expectations to one standard library; this sequence is pinned.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

private:
  double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_ = false;
};

} // namespace

Field random_band_limited(GridPtr grid, const SampleSpec& spec) {
  if (!grid) throw InvalidArgument("random_band_limited: no grid");
  if (!(spec.band_radius > 0.0)) {
    throw InvalidArgument("random_band_limited: band radius must be positive");
  }
  if (spec.band_radius >= grid->grid_radius()) {
    throw RadiusExceedsGrid("random field band radius " +
                            std::to_string(spec.band_radius) +
                            " does not fit strictly inside grid radius " +
                            std::to_string(grid->grid_radius()));
  }

  const int d = grid->dim();
  const double dxi = grid->dxi();
  const int K = static_cast<int>(std::floor(spec.band_radius / dxi));
  const double band2 = spec.band_radius * spec.band_radius;

  Field f = Field::zeros(grid, Side::Frequency);
  GaussianStream gauss(spec.seed);

  // Lexicographic walk over the integer cube; the visiting order and the
  // draw count per point depend only on (extent, band), never on n.
  std::array<int, 3> k{0, 0, 0};
  const int lo = -K, hi = K;
  std::array<int, 3> cur{lo, lo, lo};
  for (;;) {
    for (int a = 0; a < 3; ++a) k[a] = a < d ? cur[a] : 0;
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += (k[a] * dxi) * (k[a] * dxi);
    if (r2 <= band2) {
      const double g1 = gauss.next();
      const double g2 = gauss.next();
      const double amp = std::pow(1.0 + r2, -spec.decay);
      std::array<int, 3> idx{0, 0, 0};
      for (int a = 0; a < d; ++a) idx[a] = k[a] + grid->n() / 2;
      f.values[grid->ravel(idx)] = Complex(g1 * amp, g2 * amp);
    }
    // advance the innermost active axis
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++cur[a] <= hi) break;
      cur[a] = lo;
    }
    if (a < 0) break;
  }
  return f;
}

} // namespace psidyn
