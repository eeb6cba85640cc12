#pragma once

// Independent reference implementations used only by tests. Everything here
// is written directly from the defining formulas (literal O(N^2) transform
// sums, closed-form solutions, midpoint Riemann sums, finite differences) so
// a library bug cannot cancel against a test bug.

#include <cmath>
#include <complex>
#include <vector>

#include "psidyn/field.hpp"

namespace oracle {

using psidyn::Complex;
using psidyn::Field;
using psidyn::Side;

// Literal continuous-convention DFT: v(xi_k) = dx^d (2pi)^{-d/2}
// sum_j exp(-i xi_k . x_j) f(x_j). O(N^2); keep grids small.
inline Field direct_dft(const Field& f, int sign) {
  const auto& g = *f.grid;
  const Side from = sign < 0 ? Side::Physical : Side::Frequency;
  const Side to = sign < 0 ? Side::Frequency : Side::Physical;
  Field out = Field::zeros(f.grid, to);
  // cell() is the d-dimensional volume already
  const double scale = g.cell(from) * std::pow(2.0 * M_PI, -0.5 * g.dim());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto yk = g.point(k, to);
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto xj = g.point(j, from);
      const double phase =
          sign * (yk[0] * xj[0] + yk[1] * xj[1] + yk[2] * xj[2]);
      acc += f.values[j] * Complex(std::cos(phase), std::sin(phase));
    }
    out.values[k] = scale * acc;
  }
  return out;
}

inline Field direct_forward(const Field& f) { return direct_dft(f, -1); }
inline Field direct_inverse(const Field& f) { return direct_dft(f, +1); }

// Heat flow with u0(x) = exp(-x^2/2) in one dimension.
inline double heat_hat(double t, double xi) { return std::exp(-t * xi * xi - 0.5 * xi * xi); }
inline double heat_physical(double t, double x) {
  return std::exp(-x * x / (2.0 * (1.0 + 2.0 * t))) / std::sqrt(1.0 + 2.0 * t);
}
inline double heat_kernel(double t, double x) {
  return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

// Log-Laplacian propagator multiplier.
inline double log_laplacian_multiplier(double t, double abs_xi) {
  return std::pow(abs_xi, 2.0 * t);
}

// Midpoint-Riemann condition integrals, fed with a closed-form cumulative
// exponent E(s, xi) = integral_0^s Re psi and pointwise |psi(s, xi)|.
// Existence: sum over ball of cell * exp(E(t)) * |u0|.
// Uniqueness: sum over ball of cell * |u0| * Riemann_s(|psi(s)| exp(E(s))).
struct ConditionOracle {
  double existence = 0.0;
  double uniqueness = 0.0;
};

template <typename CumRe, typename AbsPsi>
ConditionOracle riemann_conditions(const Field& u0_hat, double t, double R,
                                   int steps, CumRe cum_re, AbsPsi abs_psi) {
  const auto& g = *u0_hat.grid;
  const double cell = g.cell(Side::Frequency);
  ConditionOracle out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto xi = g.point(k, Side::Frequency);
    const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if (!(r2 < R * R)) continue;
    const double a = std::abs(u0_hat.values[k]);
    out.existence += cell * std::exp(cum_re(t, xi)) * a;
    double inner = 0.0;
    const double h = t / steps;
    for (int m = 0; m < steps; ++m) {
      const double s = (m + 0.5) * h;
      inner += h * abs_psi(s, xi) * std::exp(cum_re(s, xi));
    }
    out.uniqueness += cell * a * inner;
  }
  return out;
}

// Sixth-order periodic finite-difference Laplacian, the independent check
// that the (1 + |xi|^2) frequency multiplier really is 1 - Laplace.
inline Field fd_laplacian_1d(const Field& f) {
  const auto& g = *f.grid;
  const int n = g.n();
  const double h = g.dx();
  Field out = Field::zeros(f.grid, f.side);
  const double c0 = -49.0 / 18.0, c1 = 3.0 / 2.0, c2 = -3.0 / 20.0, c3 = 1.0 / 90.0;
  for (int j = 0; j < n; ++j) {
    auto at = [&](int m) { return f.values[static_cast<std::size_t>(((m % n) + n) % n)]; };
    out.values[static_cast<std::size_t>(j)] =
        (c0 * at(j) + c1 * (at(j - 1) + at(j + 1)) + c2 * (at(j - 2) + at(j + 2)) +
         c3 * (at(j - 3) + at(j + 3))) /
        (h * h);
  }
  return out;
}

// || (1 + xi^2) e^{-xi^2/2} ||_{L_2(R)} = ((11/4) sqrt(pi))^{1/2}: the
// weighted data-norm anchor, from the Gaussian moments
// integral (1 + xi^2)^2 e^{-xi^2} = sqrt(pi) (1 + 1 + 3/4).
inline double weighted_gaussian_l2() {
  return std::sqrt(11.0 / 4.0 * std::sqrt(M_PI));
}

// ||t^{-1/4}||_{L_2(0,1)} = sqrt(2): the singular-coefficient anchor.
inline double singular_coefficient_l2() { return std::sqrt(2.0); }

} // namespace oracle
