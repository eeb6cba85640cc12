#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "psidyn/random_fields.hpp"
#include "psidyn/transforms.hpp"
#include "psidyn/wellposedness.hpp"

using namespace psidyn;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SymbolPtr diffusion(Complex a, Complex c = Complex(0.0, 0.0)) {
  return std::make_shared<SecondOrderSymbol>(
      1, std::vector<Coefficient>{Coefficient::constant(a)},
      std::vector<Coefficient>{Coefficient::constant(Complex(0.0, 0.0))},
      Coefficient::constant(c));
}

Field gaussian_hat(GridPtr g) {
  Field u = sample(g, Side::Physical, [](const std::array<double, 3>& x) {
    return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
  });
  return forward_transform(u);
}

CauchyProblem heat_problem(GridPtr g, double horizon = 1.0) {
  return CauchyProblem{diffusion(Complex(1.0, 0.0)), gaussian_hat(g), nullptr, horizon};
}

double sq(const std::array<double, 3>& xi) {
  return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
}

// midpoint-Riemann oracle inputs for the heat symbol
oracle::ConditionOracle heat_oracle(const Field& u0, double t, double R, int steps) {
  return oracle::riemann_conditions(
      u0, t, R, steps,
      [](double s, const std::array<double, 3>& xi) { return -s * sq(xi); },
      [](double, const std::array<double, 3>& xi) { return sq(xi); });
}

} // namespace

TEST_CASE("existence condition: heat data mass matches the Gaussian tail") {
  auto g = make_grid(1, 256, 40.0);
  auto prob = heat_problem(g);
  const auto rep = check_condition_A(prob, 1.0, 4.0);
  CHECK(rep.condition == "existence");
  CHECK(rep.finite);
  // int e^{-t xi^2} e^{-xi^2/2} dxi over |xi| < 4 at t = 1: essentially the
  // full integral sqrt(2 pi / 3) of the product Gaussian
  CHECK(rep.bound == doctest::Approx(std::sqrt(2.0 * M_PI / 3.0)).epsilon(1e-5));
  CHECK(rep.details["mode_count"].get<std::size_t>() > 0);
}

TEST_CASE("uniqueness condition: pure phase reduces to t times existence") {
  // psi = i: |psi| = 1 and Re psi = 0, so the rho-layer integrates to t
  auto g = make_grid(1, 64, 20.0);
  CauchyProblem prob{diffusion(Complex(0.0, 0.0), Complex(0.0, 1.0)),
                     gaussian_hat(g), nullptr, 2.0};
  const double t = 2.0;
  const auto a = check_condition_A(prob, t, 3.0);
  const auto b = check_condition_B(prob, t, 3.0);
  CHECK(b.condition == "uniqueness");
  // Re psi = 0 makes condition A the plain data mass, B exactly t times it
  CHECK(b.bound == doctest::Approx(t * a.bound).epsilon(1e-12));
}

TEST_CASE("conditions: nested-Riemann oracle battery") {
  auto g = make_grid(1, 128, 20.0);
  Field u0 = gaussian_hat(g);

  SUBCASE("heat") {
    CauchyProblem prob = heat_problem(g);
    const auto a = check_condition_A(prob, 1.0, 3.0);
    const auto b = check_condition_B(prob, 1.0, 3.0);
    const auto ora = heat_oracle(u0, 1.0, 3.0, 4096);
    CHECK(std::abs(a.bound - ora.existence) <= 0.01 * ora.existence);
    CHECK(std::abs(b.bound - ora.uniqueness) <= 0.01 * ora.uniqueness);
  }

  SUBCASE("backward heat, band-limited data") {
    Field band = random_band_limited(g, {2.0, 2.0, 17});
    for (auto& v : band.values) v = std::abs(v); // keep the mass visible
    CauchyProblem prob{diffusion(Complex(-1.0, 0.0)), band, nullptr, 1.0};
    const auto a = check_condition_A(prob, 0.5, 3.0);
    const auto b = check_condition_B(prob, 0.5, 3.0);
    const auto ora = oracle::riemann_conditions(
        band, 0.5, 3.0, 4096,
        [](double s, const std::array<double, 3>& xi) { return s * sq(xi); },
        [](double, const std::array<double, 3>& xi) { return sq(xi); });
    CHECK(std::abs(a.bound - ora.existence) <= 0.01 * ora.existence);
    CHECK(std::abs(b.bound - ora.uniqueness) <= 0.01 * ora.uniqueness);
    CHECK(a.finite);
    CHECK(b.finite);
  }

  SUBCASE("logarithmic Laplacian") {
    CauchyProblem prob{log_laplacian(), u0, nullptr, 1.0};
    const auto a = check_condition_A(prob, 1.0, 3.0);
    const auto b = check_condition_B(prob, 1.0, 3.0);
    const auto ora = oracle::riemann_conditions(
        u0, 1.0, 3.0, 8192,
        [](double s, const std::array<double, 3>& xi) {
          const double r2 = sq(xi);
          return r2 > 0.0 ? s * std::log(r2) : 0.0;
        },
        [](double, const std::array<double, 3>& xi) {
          const double r2 = sq(xi);
          return r2 > 0.0 ? std::abs(std::log(r2)) : 0.0;
        });
    CHECK(std::abs(a.bound - ora.existence) <= 0.01 * ora.existence);
    CHECK(std::abs(b.bound - ora.uniqueness) <= 0.01 * ora.uniqueness);
  }
}

TEST_CASE("conditions: argument validation") {
  auto g = make_grid(1, 32, 10.0);
  auto prob = heat_problem(g);
  CHECK_THROWS_AS(check_condition_A(prob, 1.0, 2.0 * g->grid_radius()),
                  RadiusExceedsGrid);
  CHECK_THROWS_AS(check_condition_A(prob, -1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(check_condition_A(prob, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("certificate: exponential blow-up past the threshold is not finite") {
  // backward heat with full-spectrum data on a wide band: e^{t xi^2} reaches
  // e^{(grid radius)^2} >> 1e12, so the certificate must refuse
  auto g = make_grid(1, 64, 10.0);
  Field u0 = gaussian_hat(g);
  CauchyProblem prob{diffusion(Complex(-1.0, 0.0)), u0, nullptr, 1.0};
  const auto rep = check_condition_A(prob, 1.0, 0.99 * g->grid_radius());
  CHECK_FALSE(rep.finite);
}

TEST_CASE("weighted estimate: unit weights on the heat problem") {
  auto g = make_grid(1, 128, 20.0);
  auto prob = heat_problem(g);
  const double R = 3.0;
  const auto rep = check_weighted(prob, WeightSpec::unit(), kInf, 2.0, 1.0, R);
  CHECK(rep.condition == "weighted");
  CHECK(rep.finite);

  // norm0: sup over ball and time of (1 + |psi|) e^{int Re psi}. The decay
  // e^{-rho xi^2} beats the polynomial factor only for small xi; at rho = 0
  // the factor is 1 + xi^2, so the sup is attained there at the ball edge.
  double ximax2 = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double x2 = g->abs2(k, Side::Frequency);
    if (x2 < R * R) ximax2 = std::max(ximax2, x2);
  }
  CHECK(rep.details["norm0"].get<double>() ==
        doctest::Approx(1.0 + ximax2).epsilon(1e-12));
  CHECK(rep.details["kappa0"].get<double>() == 1.0);
  CHECK(rep.details["kappa1"].get<double>() == 1.0);
  // p = infinity puts the full factor t on the forcing term
  CHECK(rep.details["conjugate_time_factor"].get<double>() == 1.0);

  // ||u0||_{L_2(B_R)} for the frequency Gaussian: pi^{1/4} up to ball tail
  CHECK(rep.details["data_norm_initial"].get<double>() ==
        doctest::Approx(std::pow(M_PI, 0.25)).epsilon(1e-4));
  // no forcing: the a-priori bound collapses to the data term
  CHECK(rep.details["data_norm_forcing"].get<double>() == 0.0);
  CHECK(rep.details["apriori_bound"].get<double>() ==
        doctest::Approx((1.0 + ximax2) * std::pow(M_PI, 0.25)).epsilon(1e-4));
}

TEST_CASE("weighted estimate: finite p time factor and forcing term") {
  auto g = make_grid(1, 64, 20.0);
  Field u0 = gaussian_hat(g);
  Field f = Field::zeros(g, Side::Frequency);
  for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = Complex(0.5, 0.0);
  CauchyProblem prob{diffusion(Complex(1.0, 0.0)), u0,
                     [f](double) { return f; }, 4.0};

  const auto p2 = check_weighted(prob, WeightSpec::unit(), 2.0, 2.0, 4.0, 2.0);
  CHECK(p2.details["conjugate_time_factor"].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-12)); // t^{1 - 1/2} = 2
  CHECK(p2.details["data_norm_forcing"].get<double>() > 0.0);

  const auto p1 = check_weighted(prob, WeightSpec::unit(), 1.0, 2.0, 4.0, 2.0);
  CHECK(p1.details["conjugate_time_factor"].get<double>() == 1.0);
}

TEST_CASE("weighted estimate: bessel weights change the data norm") {
  auto g = make_grid(1, 256, 40.0);
  WeightSpec w;
  w.W0 = [](const std::array<double, 3>& xi) { return 1.0 + xi[0] * xi[0]; };
  w.W1 = [](const std::array<double, 3>&) { return 1.0; };
  w.W2 = [](double, const std::array<double, 3>&) { return 1.0; };

  auto prob = heat_problem(g);
  // ball wide enough to hold the whole Gaussian mass
  const auto rep = check_weighted(prob, w, kInf, 2.0, 1.0, 12.0);
  // || (1+xi^2) e^{-xi^2/2} ||_{L_2} has the closed form
  CHECK(rep.details["data_norm_initial"].get<double>() ==
        doctest::Approx(oracle::weighted_gaussian_l2()).epsilon(1e-8));
  CHECK(rep.details["kappa0"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  // non-positive weight refuses loudly
  WeightSpec badw = WeightSpec::unit();
  badw.W0 = [](const std::array<double, 3>& xi) { return xi[0]; };
  CHECK_THROWS_AS(check_weighted(prob, badw, 2.0, 2.0, 1.0, 2.0), WeightNotPositive);

  // W2 must dominate W1
  WeightSpec order = WeightSpec::unit();
  order.W2 = [](double, const std::array<double, 3>&) { return 0.5; };
  CauchyProblem forced = prob;
  Field f = Field::zeros(g, Side::Frequency);
  forced.forcing_hat = [f](double) { return f; };
  CHECK_THROWS_AS(check_weighted(forced, order, 2.0, 2.0, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("log conditions: constant coefficient closed forms") {
  auto g = make_grid(1, 64, 20.0);
  auto ll = log_laplacian();

  for (double t : {0.5, 1.0}) {
    for (double R : {1.0, 2.0, 4.0}) {
      const auto rep = check_log_conditions(*ll, t, R, g);
      CHECK(rep.condition == "log");
      CHECK(rep.finite);
      // beta == 1: the coefficient part is exactly t
      CHECK(rep.details["coefficient_l1"]["bound"].get<double>() ==
            doctest::Approx(t).epsilon(1e-12));
      // power-mean part obeys the max(1, R^{2t}) envelope with lattice slack
      const double env = std::max(1.0, std::pow(R, 2.0 * t));
      CHECK(rep.details["power_mean_sup"]["bound"].get<double>() <=
            env * (1.0 + 1e-9));
      CHECK(rep.details["dropped_modes"].get<std::size_t>() >= 1); // the origin
    }
  }
}

TEST_CASE("log conditions: zero coefficient trivializes the bounds") {
  auto g = make_grid(1, 32, 10.0);
  LogSymbol sym(Coefficient::constant(Complex(0.0, 0.0)), InnerSymbol::abs2());
  const auto rep = check_log_conditions(sym, 1.0, 2.0, g);
  CHECK(rep.finite);
  CHECK(rep.details["coefficient_l1"]["bound"].get<double>() == 0.0);
  // |w|^0 == 1: the power mean is identically one
  CHECK(rep.details["power_mean_sup"]["bound"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.details["nested_power_mean_sup"]["bound"].get<double>() == 0.0);
}

TEST_CASE("log conditions: vanishing inner symbol follows the policy") {
  auto g = make_grid(1, 32, 10.0);
  auto ll = log_laplacian();
  CheckOptions opts;
  opts.zero_mode = ZeroModePolicy::Error;
  CHECK_THROWS_AS(check_log_conditions(*ll, 1.0, 2.0, g, opts), ZeroArgument);
}

TEST_CASE("second-order coefficient norms") {
  CheckOptions opts;

  SUBCASE("constant coefficients, finite p") {
    SecondOrderSymbol sym(1, {Coefficient::constant(Complex(1.0, 0.0))},
                          {Coefficient::constant(Complex(0.0, 0.0))},
                          Coefficient::constant(Complex(0.0, 2.0)));
    // ||1||_{L_2(0,4)} + ||2i||_{L_2(0,4)} = 2 + 4
    const auto rep = check_second_order(sym, 2.0, 4.0, opts);
    CHECK(rep.condition == "second_order_coefficients");
    CHECK(rep.finite);
    CHECK(rep.bound == doctest::Approx(6.0).epsilon(1e-12));
  }

  SUBCASE("sign-changing table, p = 1 exact") {
    SecondOrderSymbol sym(
        1,
        {Coefficient::table({0.0, 0.5, 1.0}, {Complex(1.0, 0.0), Complex(-1.0, 0.0)})},
        {Coefficient::constant(Complex(0.0, 0.0))},
        Coefficient::constant(Complex(0.0, 0.0)));
    const auto rep = check_second_order(sym, 1.0, 1.0, opts);
    CHECK(rep.bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.finite);
  }

  SUBCASE("integrable singularity converges, p = 2") {
    // a(t) = t^{-1/4}: ||a||_{L_2(0,1)} = sqrt(2), needs a few refinements
    SecondOrderSymbol sym(1,
                          {Coefficient::closure([](double t) {
                            return Complex(std::pow(std::max(t, 1e-300), -0.25), 0.0);
                          })},
                          {Coefficient::constant(Complex(0.0, 0.0))},
                          Coefficient::constant(Complex(0.0, 0.0)));
    CheckOptions deep = opts;
    deep.refinements = 10;
    const auto rep = check_second_order(sym, 2.0, 1.0, deep);
    CHECK(rep.finite);
    CHECK(rep.bound == doctest::Approx(oracle::singular_coefficient_l2()).epsilon(5e-3));
  }

  SUBCASE("unbounded coefficient fails the sup certificate") {
    SecondOrderSymbol sym(1,
                          {Coefficient::closure([](double t) {
                            return Complex(std::pow(std::max(t, 1e-300), -0.25), 0.0);
                          })},
                          {Coefficient::constant(Complex(0.0, 0.0))},
                          Coefficient::constant(Complex(0.0, 0.0)));
    CheckOptions deep = opts;
    deep.refinements = 6;
    const auto rep = check_second_order(sym, kInf, 1.0, deep);
    CHECK_FALSE(rep.finite);
  }
}

TEST_CASE("weight floors") {
  auto g = make_grid(1, 32, 10.0);
  const auto ok = weight_lower_bounds(WeightSpec::unit(), g, 2.0);
  CHECK(ok.condition == "weight_lower_bounds");
  CHECK(ok.finite);
  CHECK(ok.details["kappa0"].get<double>() == 1.0);
  CHECK(ok.details["kappa1"].get<double>() == 1.0);

  WeightSpec dying = WeightSpec::unit();
  dying.W0 = [](const std::array<double, 3>& xi) {
    return std::max(0.0, xi[0]);
  };
  const auto bad = weight_lower_bounds(dying, g, 2.0);
  CHECK_FALSE(bad.finite);
}
