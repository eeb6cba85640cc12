#include "psidyn/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace psidyn {

void QuadratureSpec::validate() const {
  if (panels < 1) throw InvalidArgument("quadrature panel count must be >= 1");
  if (rule == QuadRule::GaussLegendre && (order < 1 || order > 16)) {
    throw InvalidArgument("Gauss-Legendre order must be in [1, 16]");
  }
  if (!(abs_tol > 0.0)) throw InvalidArgument("quadrature abs_tol must be positive");
}

const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre_reference(int order) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Newton iteration on P_n from Chebyshev initial guesses; standard and
  // accurate to rounding for the small orders used here.
  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      double dp = order * (t * p0 - p1) / (t * t - 1.0);
      double step = p0 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = 0.0;
    for (int j = 0; j < order; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
    }
    double dp = order * (t * p0 - p1) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  // The Chebyshev seeds enumerate roots in descending order; flip for
  // ascending nodes.
  std::vector<double> xr(x.rbegin(), x.rend()), wr(w.rbegin(), w.rend());
  auto [pos, ok] = cache.emplace(order, std::make_pair(std::move(xr), std::move(wr)));
  return pos->second;
}

QuadNodes composite_nodes(double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (!(b >= a)) throw InvalidArgument("quadrature interval must have b >= a");
  QuadNodes q;
  if (b == a) return q;
  const int m = spec.panels;
  const double h = (b - a) / m;

  switch (spec.rule) {
    case QuadRule::Trapezoid: {
      q.nodes.resize(m + 1);
      q.weights.assign(m + 1, h);
      for (int i = 0; i <= m; ++i) q.nodes[i] = a + i * h;
      q.weights.front() = 0.5 * h;
      q.weights.back() = 0.5 * h;
      break;
    }
    case QuadRule::Simpson: {
      // Each panel contributes the 1-4-1 stencil on its two half-steps.
      q.nodes.resize(2 * m + 1);
      q.weights.assign(2 * m + 1, 0.0);
      const double hh = 0.5 * h;
      for (int i = 0; i <= 2 * m; ++i) q.nodes[i] = a + i * hh;
      for (int p = 0; p < m; ++p) {
        q.weights[2 * p] += h / 6.0;
        q.weights[2 * p + 1] += 4.0 * h / 6.0;
        q.weights[2 * p + 2] += h / 6.0;
      }
      break;
    }
    case QuadRule::GaussLegendre: {
      const auto& [xr, wr] = gauss_legendre_reference(spec.order);
      q.nodes.reserve(static_cast<std::size_t>(m) * spec.order);
      q.weights.reserve(static_cast<std::size_t>(m) * spec.order);
      for (int p = 0; p < m; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int i = 0; i < spec.order; ++i) {
          q.nodes.push_back(mid + 0.5 * h * xr[i]);
          q.weights.push_back(0.5 * h * wr[i]);
        }
      }
      break;
    }
  }
  return q;
}

std::complex<double> integrate(const Integrand& f, double a, double b,
                               const QuadratureSpec& spec) {
  QuadNodes q = composite_nodes(a, b, spec);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(q.nodes[i]);
  return acc;
}

double integrate_real(const RealIntegrand& f, double a, double b,
                      const QuadratureSpec& spec) {
  QuadNodes q = composite_nodes(a, b, spec);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(q.nodes[i]);
  return acc;
}

namespace {

template <typename Value, typename Fn>
Value refine_impl(const Fn& pass, double a, double b, const QuadratureSpec& spec,
                  int max_doublings) {
  QuadratureSpec s = spec;
  Value prev = pass(a, b, s);
  for (int d = 0; d < max_doublings; ++d) {
    s.panels *= 2;
    Value next = pass(a, b, s);
    if (std::abs(next - prev) < spec.abs_tol) return next;
    prev = next;
  }
  throw QuadratureDivergence(
      "refinement did not reach abs_tol " + std::to_string(spec.abs_tol) +
      " within " + std::to_string(max_doublings) + " panel doublings from " +
      std::to_string(spec.panels) + " panels");
}

} // namespace

std::complex<double> integrate_refined(const Integrand& f, double a, double b,
                                       const QuadratureSpec& spec,
                                       int max_doublings) {
  return refine_impl<std::complex<double>>(
      [&](double lo, double hi, const QuadratureSpec& s) {
        return integrate(f, lo, hi, s);
      },
      a, b, spec, max_doublings);
}

double integrate_real_refined(const RealIntegrand& f, double a, double b,
                              const QuadratureSpec& spec, int max_doublings) {
  return refine_impl<double>(
      [&](double lo, double hi, const QuadratureSpec& s) {
        return integrate_real(f, lo, hi, s);
      },
      a, b, spec, max_doublings);
}

} // namespace psidyn
