#pragma once

#include <string>
#include <vector>

#include "psidyn/propagator.hpp"
#include "psidyn/report_json.hpp"

namespace psidyn {

// Smooth frequency-side test bump: hat(xi) = exp(-1/(1 - |xi/R0|^2)) strictly
// inside |xi| < R0, zero outside. Pairings against it realize testing the
// solution against functions whose transform is smooth and compactly
// supported. l1_mass = sum |hat| * cell is the Lipschitz constant that turns
// a pointwise residual bound into a pairing bound.
struct TestFunction {
  Field hat;
  double radius = 0.0;
  double l1_mass = 0.0;
};

// Throws SupportExceedsGrid unless 0 < R0 < grid radius.
TestFunction make_bump(GridPtr grid, double R0);

struct ResidualOptions {
  // quadrature rule applied on the trajectory's own time mesh
  QuadRule rule = QuadRule::Trapezoid;
  // quadrature settings for symbol time-integrals (the gap envelope exponent)
  QuadratureSpec symbol_quad{};
  ZeroModePolicy zero_mode = ZeroModePolicy::Drop;
};

// One residual diagnostic: per-time norms plus per-time counts of modes that
// had to be excluded because some snapshot involved was not representable
// (overflow-masked, or shifted past double range).
struct ResidualReport {
  std::string kind;
  std::vector<double> times;
  std::vector<double> residuals;
  std::vector<std::size_t> excluded_modes;
  Json details;

  Json to_json() const;
};

// Frequency-ODE residual: for each trajectory time t,
//   R(t, xi) = u_hat(t) - u_hat(0) - Quad[0,t](psi(s, xi) u_hat(s))
//                               - Quad[0,t](f_hat(s)),
// quadratured on the trajectory mesh (plus the s = 0 node, where the
// solution is the initial data). Reports max_xi |R| over representable
// modes. Throws InsufficientTimes with fewer than 3 snapshots.
ResidualReport representation_residual(const SolutionTrajectory& traj,
                                       const CauchyProblem& problem,
                                       const ResidualOptions& opts = {});

// Weak-form residual: the same identity paired against the bump, every
// pairing realized as sum_k g_k conj(phi_hat_k) * cell on the frequency
// lattice. The exclusion set at each time is shared across the terms, so
// the result is exactly |<R(t), phi_hat>| and obeys
//   weak residual <= l1_mass * max |R|.
ResidualReport weak_form_residual(const SolutionTrajectory& traj,
                                  const CauchyProblem& problem,
                                  const TestFunction& phi,
                                  const ResidualOptions& opts = {});

// Uniqueness gap between two runs of the same problem: per time,
// max_xi |u_hat_A - u_hat_B| over modes representable in both, with the
// integrating-factor envelope exp(int_0^t |psi|) reported alongside (its
// exponent too, since the envelope itself may exceed double range).
// Throws GridMismatch when lattices or time lists differ.
ResidualReport gronwall_gap(const SolutionTrajectory& a,
                            const SolutionTrajectory& b, SymbolPtr symbol,
                            const ResidualOptions& opts = {});

// orders[i] = log2(residuals[i] / residuals[i+1]); the observed convergence
// order sequence under mesh halving.
std::vector<double> convergence_orders(const std::vector<double>& residuals);

// Solve the problem on each step count (uniform mesh up to the horizon),
// compute the representation residual, and tabulate step size vs worst
// residual with observed orders. meshes must hold at least 3 increasing
// step counts.
Json residual_study(const CauchyProblem& problem, const std::vector<int>& meshes,
                    const ResidualOptions& opts = {},
                    const SolveOptions& solve_opts = {});

// CSV rows "dt,residual,order" for a residual_study table ('.' decimal,
// ',' separator, header included, final newline).
std::string residual_csv(const Json& study);

} // namespace psidyn
