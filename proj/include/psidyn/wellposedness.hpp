#pragma once

#include "psidyn/propagator.hpp"
#include "psidyn/report_json.hpp"

namespace psidyn {

// Frequency weights for the weighted solvability estimate. W0 scales the
// initial-data norm, W1 the forcing envelope, W2(s, xi) the forcing data
// norm; all must be strictly positive where sampled, and W2 >= W1 pointwise
// on the sampled set. w is an optional time weight for trajectory norms.
struct WeightSpec {
  std::function<double(const std::array<double, 3>&)> W0;
  std::function<double(const std::array<double, 3>&)> W1;
  std::function<double(double, const std::array<double, 3>&)> W2;
  std::function<double(double)> w;

  // All weights identically one.
  static WeightSpec unit();
};

// Numerical certificate for one integrability condition. `bound` is the
// lattice value of the condition's integral at the finest mesh; `finite`
// certifies that the value stayed under a hard threshold and moved by less
// than a relative tolerance over the last two mesh halvings. A true
// condition value of infinity shows up as a bound that keeps growing, never
// as a silent clamp.
struct ConditionReport {
  std::string condition;
  Json params;
  double bound = 0.0;
  bool finite = false;
  Json details;

  Json to_json() const;
};

struct CheckOptions {
  int time_steps = 64;      // base time-mesh resolution
  int refinements = 2;      // additional doublings for the certificate
  double finite_threshold = 1e12;
  double stability_rel = 0.01;
  QuadratureSpec quad;      // segment quadrature for symbol time integrals
  ZeroModePolicy zero_mode = ZeroModePolicy::Drop;
};

// Existence condition: the propagated absolute data mass over the ball,
//
//   int_{B_R} e^{int_0^t Re psi} |u0_hat| dxi
//   + int_{B_R} int_0^t e^{int_s^t Re psi} |f_hat(s)| ds dxi,
//
// evaluated as a lattice sum over |xi| < R with trapezoid time quadrature on
// a refining mesh. Memory scales as ball modes x mesh nodes.
ConditionReport check_condition_A(const CauchyProblem& problem, double t, double R,
                                  const CheckOptions& opts = {});

// Uniqueness condition: same structure with the |psi(rho, xi)| factor and
// the inner Duhamel layer,
//
//   int_{B_R} int_0^t |psi(rho)| e^{int_0^rho Re psi} drho |u0_hat| dxi
//   + int_{B_R} int_0^t |psi(rho)| int_0^rho e^{int_s^rho Re psi}
//       |f_hat(s)| ds drho dxi.
ConditionReport check_condition_B(const CauchyProblem& problem, double t, double R,
                                  const CheckOptions& opts = {});

// Weighted solvability estimate. Computes the two mixed-norm envelopes
//
//   norm0 = || sup_{B_R} (1+|psi(rho,.)|)/W0 e^{int_0^rho Re psi} ||_{L_p(0,t)}
//   norm1 = || sup_{B_R} (1+|psi(rho,.)|)/W1 e^{int_0^rho |Re psi|} ||_{L_p(0,t)}
//
// together with the weighted data norms and the a-priori bound
//
//   norm0 * ||u0_hat||_{L_q(B_R, W0^q dxi)}
//   + t^{1/p'} * norm1 * ||f_hat||_{L_{p,q}((0,t) x B_R, ds W2^q dxi)}.
//
// The condition value (refined for the certificate) is norm0 + norm1.
// Throws WeightNotPositive on a non-positive sampled weight.
ConditionReport check_weighted(const CauchyProblem& problem,
                               const WeightSpec& weights, double p, double q,
                               double t, double R, const CheckOptions& opts = {});

// The three logarithmic-family conditions for psi = beta(t) Log(inner):
//   coefficient_l1:       int_0^t |beta|
//   power_mean_sup:       sup_{s<t, xi in B_R} (t-s)^{-1}
//                             int_s^t |inner(r,xi)|^{(t-s) Re beta(r)} dr
//   nested_power_mean_sup: sup_{s<t, xi} int_s^t |beta(rho)|
//                             (1+|log|inner(rho,xi)||) [(rho-s)^{-1}
//                             int_s^rho |inner|^{(rho-s) Re beta}] drho
// Modes where the inner symbol vanishes at a sampled node are dropped (and
// counted) under the Drop policy, rethrown under Error. The headline bound
// is the largest of the three parts.
ConditionReport check_log_conditions(const LogSymbol& sym, double t, double R,
                                     GridPtr grid, const CheckOptions& opts = {});

// Coefficient integrability of the second-order family:
//   sum_ij ||a_ij||_{L_p(0,t)} + sum_j ||b_j||_{L_p(0,t)} + ||c||_{L_p(0,t)}.
// Breakpoint tables evaluate in closed form; closures use quadrature (finite
// p) or a sampled maximum (p = infinity), so a non-integrable singularity
// fails the stability certificate instead of sneaking through.
ConditionReport check_second_order(const SecondOrderSymbol& sym, double p,
                                   double t, const CheckOptions& opts = {});

// Lattice lower bounds kappa0 = min_{B_R} W0 and kappa1 = min_{B_R} W1,
// the constants that divide the a-priori estimate. Reports finite = false
// when a minimum is non-positive instead of throwing; examining weight
// positivity is this op's purpose.
ConditionReport weight_lower_bounds(const WeightSpec& weights, GridPtr grid,
                                    double R);

} // namespace psidyn
