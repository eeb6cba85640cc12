#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "psidyn/symbols.hpp"

using namespace psidyn;

namespace {

const std::array<double, 3> XI1{1.5, 0.0, 0.0};

QuadratureSpec default_quad() { return QuadratureSpec{}; }

// sign-changing diffusion: +1 on [0, 1/2), -1 on [1/2, 1)
Coefficient sign_table() {
  return Coefficient::table({0.0, 0.5, 1.0}, {Complex(1.0, 0.0), Complex(-1.0, 0.0)});
}

} // namespace

TEST_CASE("coefficient: evaluation, clamping, closed-form integrals") {
  const Coefficient k = Coefficient::constant(Complex(2.0, -1.0));
  CHECK(k.at(0.3) == Complex(2.0, -1.0));
  CHECK(k.integral(0.0, 2.0) == Complex(4.0, -2.0));

  const Coefficient tab = sign_table();
  CHECK(tab.at(0.0) == Complex(1.0, 0.0));
  CHECK(tab.at(0.49) == Complex(1.0, 0.0));
  CHECK(tab.at(0.5) == Complex(-1.0, 0.0));
  // clamped outside the breakpoint range
  CHECK(tab.at(-1.0) == Complex(1.0, 0.0));
  CHECK(tab.at(7.0) == Complex(-1.0, 0.0));
  CHECK(tab.integral(0.0, 1.0) == Complex(0.0, 0.0));
  CHECK(tab.integral(0.25, 0.75).real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tab.integral(0.0, 0.5) == Complex(0.5, 0.0));
  // clamped tail keeps integrating the edge value
  CHECK(tab.integral(0.5, 2.0) == Complex(-1.5, 0.0));

  std::vector<double> pts;
  tab.split_points(0.0, 1.0, pts);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0] == 0.5);
  pts.clear();
  tab.split_points(0.5, 1.0, pts); // 0.5 is an endpoint, not interior
  CHECK(pts.empty());

  const Coefficient fn = Coefficient::closure([](double t) { return Complex(t * t, 0.0); });
  CHECK_FALSE(fn.exact());
  CHECK(fn.at(2.0) == Complex(4.0, 0.0));
  CHECK_THROWS_AS(fn.integral(0.0, 1.0), InvalidArgument);
}

TEST_CASE("second-order symbol: values and exact integrals") {
  // psi(t, xi) = -a(t) xi^2 + i b xi + c with a sign-changing, b, c constant
  SecondOrderSymbol sym(1, {sign_table()},
                        {Coefficient::constant(Complex(0.5, 0.0))},
                        Coefficient::constant(Complex(0.0, 1.0)));
  const double xi = XI1[0];
  const Complex at0 = sym.eval(0.25, XI1);
  CHECK(at0.real() == doctest::Approx(-xi * xi).epsilon(1e-15));
  CHECK(at0.imag() == doctest::Approx(0.5 * xi + 1.0).epsilon(1e-15));
  const Complex at1 = sym.eval(0.75, XI1);
  CHECK(at1.real() == doctest::Approx(xi * xi).epsilon(1e-15));

  const QuadratureSpec quad = default_quad();
  // over the full sign cancellation window the quadratic part vanishes
  const Complex full = sym.integrate(0.0, 1.0, XI1, quad);
  CHECK(full.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(full.imag() == doctest::Approx(0.5 * xi + 1.0).epsilon(1e-14));

  // |Re psi| does not cancel
  CHECK(sym.integrate_abs_re(0.0, 1.0, XI1, quad) ==
        doctest::Approx(xi * xi).epsilon(1e-14));
  const double abs_val = std::hypot(xi * xi, 0.5 * xi + 1.0);
  CHECK(sym.integrate_abs(0.0, 1.0, XI1, quad) ==
        doctest::Approx(abs_val).epsilon(1e-14));

  // a closure coefficient integrates through quadrature to the same answer
  SecondOrderSymbol lazy(1,
                         {Coefficient::closure([](double t) {
                           return t < 0.5 ? Complex(1.0, 0.0) : Complex(-1.0, 0.0);
                         })},
                         {Coefficient::constant(Complex(0.5, 0.0))},
                         Coefficient::constant(Complex(0.0, 1.0)));
  QuadratureSpec fine = quad;
  fine.panels = 256;
  const Complex lf = lazy.integrate(0.0, 1.0, XI1, fine);
  CHECK(std::abs(lf - full) < 1e-10);
}

TEST_CASE("second-order symbol: constructor shape checks") {
  CHECK_THROWS_AS(SecondOrderSymbol(1, {}, {Coefficient::constant(0.0)},
                                    Coefficient::constant(0.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(SecondOrderSymbol(2, {Coefficient::constant(1.0)},
                                    {Coefficient::constant(0.0), Coefficient::constant(0.0)},
                                    Coefficient::constant(0.0)),
                  InvalidArgument);
}

TEST_CASE("inner symbols: |xi|^2 and quadratic forms") {
  const InnerSymbol a2 = InnerSymbol::abs2();
  CHECK(a2.time_constant);
  CHECK(a2.eval(0.7, {1.0, 1.0, 0.0}) == Complex(2.0, 0.0));

  const InnerSymbol q = InnerSymbol::quadratic_form(
      2, {Coefficient::constant(1.0), Coefficient::constant(0.0),
          Coefficient::constant(0.0), Coefficient::constant(3.0)});
  CHECK(q.eval(0.0, {2.0, 1.0, 0.0}) == Complex(7.0, 0.0));
}

TEST_CASE("log symbol: principal branch, zero modes, exact integration") {
  auto ll = log_laplacian();
  CHECK(ll->family() == "log_laplacian");
  const std::array<double, 3> xi{2.0, 0.0, 0.0};
  CHECK(ll->eval(0.0, xi).real() == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(ll->eval(0.0, xi).imag() == 0.0);
  CHECK_THROWS_AS(ll->eval(0.0, {0.0, 0.0, 0.0}), ZeroArgument);

  // negative inner value lands on the branch cut: phase exactly +pi
  LogSymbol neg(Coefficient::constant(1.0),
                InnerSymbol{[](double, const std::array<double, 3>& p) {
                              return Complex(-p[0] * p[0], 0.0);
                            },
                            true,
                            Json::object()});
  const Complex v = neg.eval(0.0, {3.0, 0.0, 0.0});
  CHECK(v.real() == doctest::Approx(std::log(9.0)).epsilon(1e-15));
  CHECK(v.imag() == doctest::Approx(M_PI).epsilon(1e-15));

  const QuadratureSpec quad = default_quad();
  // beta exact and inner time-constant: integral is beta-integral * log value
  LogSymbol scaled(sign_table(), InnerSymbol::abs2());
  const Complex ig = scaled.integrate(0.0, 0.75, xi, quad);
  const Complex expect = Complex(0.25, 0.0) * std::log(Complex(4.0, 0.0));
  CHECK(std::abs(ig - expect) < 1e-14);
  CHECK(scaled.integrate_abs(0.0, 1.0, xi, quad) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-13));

  // closure beta falls back to quadrature and matches the closed form
  LogSymbol lazy(Coefficient::closure([](double t) { return Complex(t, 0.0); }),
                 InnerSymbol::abs2());
  QuadratureSpec gl = quad;
  const Complex li = lazy.integrate(0.0, 1.0, xi, gl);
  CHECK(std::abs(li - Complex(0.5 * std::log(4.0), 0.0)) < 1e-12);
}

TEST_CASE("tabulated symbol: lattice-pinned piecewise values") {
  auto g = make_grid(1, 8, 2.0 * M_PI);
  std::vector<Complex> t0(g->size()), t1(g->size());
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double xi = g->coord(static_cast<int>(k), Side::Frequency);
    t0[k] = Complex(-xi * xi, 0.0);
    t1[k] = Complex(xi, 1.0);
  }
  TabulatedSymbol sym(g, {0.0, 1.0, 2.0}, {t0, t1});

  const std::array<double, 3> on{g->coord(6, Side::Frequency), 0.0, 0.0};
  CHECK(sym.eval(0.5, on) == t0[6]);
  CHECK(sym.eval(1.5, on) == t1[6]);
  CHECK(sym.eval(5.0, on) == t1[6]); // clamped in time

  const std::array<double, 3> off{g->coord(6, Side::Frequency) + 0.3 * g->dxi(), 0.0, 0.0};
  CHECK_THROWS_AS(sym.eval(0.5, off), InvalidArgument);

  const QuadratureSpec quad = default_quad();
  const Complex ig = sym.integrate(0.5, 1.5, on, quad);
  CHECK(std::abs(ig - (0.5 * t0[6] + 0.5 * t1[6])) < 1e-14);
  CHECK(sym.integrate_abs(0.5, 1.5, on, quad) ==
        doctest::Approx(0.5 * std::abs(t0[6]) + 0.5 * std::abs(t1[6])).epsilon(1e-14));
  CHECK(sym.integrate_abs_re(0.5, 1.5, on, quad) ==
        doctest::Approx(0.5 * std::abs(t0[6].real()) + 0.5 * std::abs(t1[6].real()))
            .epsilon(1e-14));

  CHECK_THROWS_AS(TabulatedSymbol(g, {0.0, 1.0}, {t0, t1}), InvalidArgument);
  CHECK_THROWS_AS(TabulatedSymbol(g, {0.0, 1.0, 2.0}, {t0, {Complex(0.0, 0.0)}}),
                  GridMismatch);
}

TEST_CASE("zero-mode policy wrappers") {
  auto ll = log_laplacian();
  const std::array<double, 3> zero{0.0, 0.0, 0.0};
  const QuadratureSpec quad = default_quad();

  CHECK(symbol_value(*ll, 0.0, zero, ZeroModePolicy::Drop) == Complex(0.0, 0.0));
  CHECK(symbol_integral(*ll, 0.0, 1.0, zero, quad, ZeroModePolicy::Drop) ==
        Complex(0.0, 0.0));
  CHECK(symbol_integral_abs(*ll, 0.0, 1.0, zero, quad, ZeroModePolicy::Drop) == 0.0);
  CHECK_THROWS_AS(symbol_value(*ll, 0.0, zero, ZeroModePolicy::Error), ZeroArgument);
  CHECK_THROWS_AS(symbol_integral(*ll, 0.0, 1.0, zero, quad, ZeroModePolicy::Error),
                  ZeroArgument);

  // away from the zero set the policy is irrelevant
  const std::array<double, 3> xi{1.0, 0.0, 0.0};
  CHECK(symbol_value(*ll, 0.0, xi, ZeroModePolicy::Drop) ==
        symbol_value(*ll, 0.0, xi, ZeroModePolicy::Error));
}

TEST_CASE("symbol integration contract and cocycle additivity") {
  SecondOrderSymbol sym(1, {sign_table()},
                        {Coefficient::constant(Complex(0.5, 0.0))},
                        Coefficient::constant(Complex(0.0, 1.0)));
  const QuadratureSpec quad = default_quad();
  CHECK_THROWS_AS(integrate_symbol(sym, 0.5, 0.2, XI1, quad), InvalidArgument);
  CHECK_THROWS_AS(integrate_symbol(sym, -0.1, 0.2, XI1, quad), InvalidArgument);

  const Complex whole = integrate_symbol(sym, 0.0, 1.0, XI1, quad);
  const Complex split = integrate_symbol(sym, 0.0, 0.37, XI1, quad) +
                        integrate_symbol(sym, 0.37, 1.0, XI1, quad);
  CHECK(std::abs(whole - split) < 1e-12);

  auto ll = log_laplacian();
  const std::array<double, 3> xi{0.8, 0.0, 0.0};
  const Complex lw = integrate_symbol(*ll, 0.0, 2.0, xi, quad);
  const Complex ls = integrate_symbol(*ll, 0.0, 1.3, xi, quad) +
                     integrate_symbol(*ll, 1.3, 2.0, xi, quad);
  CHECK(std::abs(lw - ls) < 1e-12);
}
