#pragma once

#include <cstdint>
#include <limits>

#include "psidyn/field.hpp"
#include "psidyn/report_json.hpp"
#include "psidyn/transforms.hpp"

namespace psidyn {

// Multiply by (1 + |y_dual|^2)^{gamma/2} in the dual variable: transform to
// the other side, scale on that lattice, transform back. This is the Bessel
// regularity operator (1 - Laplacian)^{gamma/2} for physical fields and its
// mirror for frequency fields; both are well-defined this way because the
// squared transform is the reflection, which commutes with radial
// multipliers. gamma = 0 returns the field untouched.
Field bessel_multiplier_apply(const Field& f, double gamma);

// Weighted Bessel-potential norm parameters. gamma1 is the regularity
// exponent (applied through the dual side), gamma2 the power of the weight
// (1 + |y|^2)^{1/2} on the field's own lattice, q the lattice integrability
// exponent (q = infinity for the lattice maximum).
struct BesselNormSpec {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double q = 2.0;
};

// Weight first, regularity second: || B^{g1} [ w^{g2} f ] ||_{L_q}.
double inner_norm(const Field& f, const BesselNormSpec& spec);

// Regularity first, weight second: || w^{g2} B^{g1} f ||_{L_q}.
double outer_norm(const Field& f, const BesselNormSpec& spec);

// L_p-in-time composition of a per-snapshot space norm over a trajectory of
// plain fields: trapezoid in t of [w(t) * norm(u(t))]^p on the snapshot
// times (maximum for p = infinity). time_weight may be empty (weight 1).
struct TrajectoryNormSpec {
  BesselNormSpec space;
  bool use_outer = false;
  double p = 2.0;
  std::function<double(double)> time_weight;
};
double trajectory_norm(const std::vector<double>& times,
                       const std::vector<Field>& fields,
                       const TrajectoryNormSpec& spec);

// Norm inequalities checked on random band-limited fields. Equality cases
// (the L2 isometry, reflection symmetry of the transforms) demand agreement
// to rounding; inequalities allow the configured slack on top of the sharp
// constant; the weight-window variant has no sharp constant and only
// reports its ratio statistics.
enum class PropId {
  RieszThorin,            // ||F f||_p <= (2pi)^{-d(p-2)/(2p)} ||f||_{p'}, p >= 2
  L2Isometry,             // inner (g1,g2) of f == outer (g2,g1) of F f at q = 2
  InnerEmbedding,         // gamma1 decrease, constant 1
  OuterEmbedding,         // gamma2 decrease, constant 1
  InOutBridge,            // ||F f||_{out,p'} <= (2pi)^{-d(2-p)/(2p)} ||f||_{in,p}, p <= 2
  LargeExponentEmbedding, // p > 2 into a weighted L2 inner norm, Gamma-function constant
  TransformPairSymmetry,  // reflection invariance: forward vs inverse transform norms
  OuterWeightWindow       // diagnostic: gamma1 decrease under outer norms, no constant
};

struct PropParams {
  int dim = 1;
  int n = 128;
  double extent = 20.0;
  int samples = 100;
  std::uint64_t seed = 1;
  double decay = 3.0;
  double band_fraction = 0.4; // band = fraction * grid radius
  double slack = 0.02;
  double equality_tol = 1e-9;
  bool refine = true; // re-run at doubled n, same coefficients

  double p = 2.0;
  double q = 2.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double gamma1_tilde = 0.0;
  double gamma2_tilde = 0.0;
  double delta = 2.0;
};

struct PropertyReport {
  std::string prop;
  Json params;
  int samples = 0;
  double worst_ratio = 0.0;
  double mean_ratio = 0.0;
  double bound = 1.0; // pass threshold on the ratio
  bool pass = false;
  bool equality = false;
  double worst_ratio_refined = std::numeric_limits<double>::quiet_NaN();
  Json details;

  Json to_json() const;
};

PropertyReport check_proposition(PropId id, const PropParams& params);

std::string prop_name(PropId id);

} // namespace psidyn
