#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "psidyn/errors.hpp"

namespace psidyn {

enum class QuadRule { Trapezoid, Simpson, GaussLegendre };

// Composite quadrature description used everywhere a time integral appears.
// order is the Gauss-Legendre node count per panel and is ignored by the
// other rules; panels is the panel count over the whole interval; abs_tol is
// the target for adaptive refinement where an operation refines.
struct QuadratureSpec {
  QuadRule rule = QuadRule::GaussLegendre;
  int order = 4;
  int panels = 64;
  double abs_tol = 1e-10;

  void validate() const;
};

using Integrand = std::function<std::complex<double>(double)>;
using RealIntegrand = std::function<double(double)>;

// Nodes and weights of a composite rule on [a, b], in ascending node order.
// Simpson requires uniform panels by construction; all rules here do.
struct QuadNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadNodes composite_nodes(double a, double b, const QuadratureSpec& spec);

// Single fixed-resolution pass.
std::complex<double> integrate(const Integrand& f, double a, double b,
                               const QuadratureSpec& spec);
double integrate_real(const RealIntegrand& f, double a, double b,
                      const QuadratureSpec& spec);

// Panel-doubling refinement until successive passes differ by less than
// abs_tol; throws QuadratureDivergence past the doubling cap.
std::complex<double> integrate_refined(const Integrand& f, double a, double b,
                                       const QuadratureSpec& spec,
                                       int max_doublings = 12);
double integrate_real_refined(const RealIntegrand& f, double a, double b,
                              const QuadratureSpec& spec,
                              int max_doublings = 12);

// Gauss-Legendre nodes/weights on [-1, 1], cached per order (order >= 1).
const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre_reference(int order);

} // namespace psidyn
