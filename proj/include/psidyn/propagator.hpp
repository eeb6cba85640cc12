#pragma once

#include <functional>
#include <vector>

#include "psidyn/field.hpp"
#include "psidyn/log_complex.hpp"
#include "psidyn/symbols.hpp"

namespace psidyn {

// exp(integral_s^t psi(r, xi) dr) kept on log scale. The real part of the
// exponent can reach thousands for growing problems, so the value is never
// materialized here. Modes where the symbol has no value follow the policy
// (Drop: exponent 0, multiplier 1, matching a symbol coefficient of zero).
LogComplex multiplier(const Symbol& sym, double s, double t,
                      const std::array<double, 3>& xi, const QuadratureSpec& quad,
                      ZeroModePolicy policy = ZeroModePolicy::Drop);

// Cauchy problem data on the frequency side: d/dt u = psi(t, -i grad) u + f,
// u(0) = u0. forcing_hat may be empty (no forcing); when present it must
// return a plain frequency-side field on the same grid for any time in
// [0, horizon].
struct CauchyProblem {
  SymbolPtr symbol;
  Field u0_hat;
  std::function<Field(double)> forcing_hat;
  double horizon = 0.0;
};

// Forcing given as snapshots on a time mesh. Lookups at mesh times are
// exact; between nodes the snapshots are interpolated linearly and clamped
// beyond the ends. Mesh-rule solves only evaluate at the nodes themselves.
std::function<Field(double)> tabulated_forcing(std::vector<double> times,
                                               std::vector<Field> fields);

// How the Duhamel integral is discretized. Trapezoid and Simpson run on the
// time mesh (default: 0 together with the requested output times, or the
// explicit mesh below, which must contain every output time). Gauss-Legendre
// integrates each [0, t] with `panels` panels of `order` nodes and suits
// closed-form forcings.
struct DuhamelSpec {
  QuadRule rule = QuadRule::Trapezoid;
  int order = 4;
  int panels = 32;
  std::vector<double> mesh;
};

struct SolveOptions {
  QuadratureSpec symbol_quad;
  DuhamelSpec duhamel;
  ZeroModePolicy zero_mode = ZeroModePolicy::Drop;
};

struct TimeDiagnostics {
  // max over modes of Re integral_0^t psi: how hard the problem grows.
  double max_re_exponent = 0.0;
  std::size_t overflow_count = 0;
  // Probe estimate of the symbol-quadrature error at the outermost mode:
  // difference between the panel count in use and its doubling, summed over
  // mesh segments. Exactly integrable families report 0.
  double quad_error_estimate = 0.0;
};

struct SolutionTrajectory {
  GridPtr grid;
  std::vector<double> times;
  std::vector<Field> u_hat;
  std::vector<TimeDiagnostics> diagnostics;
};

// Evaluate u_hat(t, xi) = M(0,t,xi) u0_hat(xi) + sum_q w_q M(s_q,t,xi)
// f_hat(s_q,xi) at the requested times, entirely on log scale per mode; the
// returned fields carry one magnitude shift each and flag modes whose true
// magnitude exceeds double range. Nothing is clamped: flagged modes keep
// their shifted stand-in value and are excluded from plain-value consumers.
SolutionTrajectory solve(const CauchyProblem& problem,
                         const std::vector<double>& times,
                         const SolveOptions& options = {});

// Convolution kernel of the propagator: K(s,t,.) = (2 pi)^{-d/2} *
// inverse_transform(multiplier field), normalized so u(t) = K * u(s) with
// ordinary convolution (sanity anchors: psi == 0 gives the discrete delta of
// unit mass, heat gives the Gaussian kernel of unit mass). Throws
// KernelOverflow if any multiplier mode cannot be materialized.
Field kernel_snapshot(const Symbol& sym, double s, double t, GridPtr grid,
                      const QuadratureSpec& quad,
                      ZeroModePolicy policy = ZeroModePolicy::Drop);

// Frequency-side action psi(t, -i grad): multiply each mode by psi(t, xi_k).
// Outside the symbol's declared support the output is zero regardless of the
// input value; dropped modes (policy) contribute zero as well.
Field apply_operator(const Symbol& sym, double t, const Field& u_hat,
                     ZeroModePolicy policy = ZeroModePolicy::Drop);

} // namespace psidyn
