#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "psidyn/field.hpp"
#include "psidyn/field_io.hpp"
#include "psidyn/grid.hpp"
#include "psidyn/log_complex.hpp"
#include "psidyn/parallel.hpp"
#include "psidyn/quadrature.hpp"
#include "psidyn/random_fields.hpp"
#include "psidyn/report_json.hpp"
#include "psidyn/transforms.hpp"

using namespace psidyn;

namespace {

double linf_diff(const Field& a, const Field& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a.values[k] - b.values[k]));
  }
  return m;
}

double linf(const Field& a) {
  double m = 0.0;
  for (const Complex& v : a.values) m = std::max(m, std::abs(v));
  return m;
}

} // namespace

TEST_CASE("grid: centered lattice geometry") {
  auto g = make_grid(1, 8, 2.0 * M_PI);
  CHECK(g->dx() == doctest::Approx(2.0 * M_PI / 8).epsilon(1e-15));
  CHECK(g->dxi() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->dx() * g->dxi() * 8 == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
  CHECK(g->coord(0, Side::Frequency) == doctest::Approx(-4.0));
  CHECK(g->coord(4, Side::Frequency) == doctest::Approx(0.0));
  CHECK(g->coord(7, Side::Physical) == doctest::Approx(3.0 * g->dx()));

  auto g2 = make_grid(2, 4, 4.0 * M_PI);
  CHECK(g2->dxi() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g2->grid_radius() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2->cell(Side::Frequency) == doctest::Approx(0.25).epsilon(1e-15));

  auto g3 = make_grid(3, 4, 1.0);
  for (std::size_t k = 0; k < g3->size(); ++k) {
    CHECK(g3->ravel(g3->unravel(k)) == k);
  }
}

TEST_CASE("grid: constructor contract") {
  CHECK_THROWS_AS(make_grid(1, 7, 1.0), OddSize);
  CHECK_THROWS_AS(make_grid(1, 2, 1.0), OddSize);
  CHECK_THROWS_AS(make_grid(0, 8, 1.0), BadDim);
  CHECK_THROWS_AS(make_grid(4, 8, 1.0), BadDim);
  CHECK_THROWS_AS(make_grid(1, 8, -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(1, 8, 0.0), InvalidArgument);
}

TEST_CASE("transforms: constant field concentrates at zero frequency") {
  auto g = make_grid(1, 8, 2.0 * M_PI);
  Field one = Field::zeros(g, Side::Physical);
  for (auto& v : one.values) v = 1.0;
  Field hat = forward_transform(one);
  CHECK(std::abs(hat.values[4] - std::sqrt(2.0 * M_PI)) < 1e-13);
  for (std::size_t k = 0; k < hat.size(); ++k) {
    if (k != 4) CHECK(std::abs(hat.values[k]) < 1e-13);
  }
}

TEST_CASE("transforms: flat spectrum is the unit-mass discrete delta") {
  auto g = make_grid(1, 16, 8.0);
  Field hat = Field::zeros(g, Side::Frequency);
  for (auto& v : hat.values) v = std::pow(2.0 * M_PI, -0.5);
  Field u = inverse_transform(hat);
  CHECK(std::abs(u.values[8] - 1.0 / g->dx()) < 1e-12 / g->dx());
  double mass = 0.0;
  for (const auto& v : u.values) mass += v.real();
  CHECK(mass * g->cell(Side::Physical) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transforms: Gaussian is its own transform") {
  auto g = make_grid(1, 256, 40.0);
  Field u = sample(g, Side::Physical, [](const std::array<double, 3>& x) {
    return Complex(std::exp(-0.5 * x[0] * x[0]), 0.0);
  });
  Field hat = forward_transform(u);
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const double xi = g->coord(static_cast<int>(k), Side::Frequency);
    CHECK(std::abs(hat.values[k] - std::exp(-0.5 * xi * xi)) < 1e-12);
  }
}

TEST_CASE("transforms: literal DFT oracle agreement") {
  SUBCASE("one dimension, n = 32") {
    auto g = make_grid(1, 32, 10.0);
    Field f = random_band_limited(g, {0.8 * g->grid_radius(), 2.0, 7});
    Field u = inverse_transform(f);
    CHECK(linf_diff(forward_transform(u), oracle::direct_forward(u)) < 1e-12);
    CHECK(linf_diff(inverse_transform(f), oracle::direct_inverse(f)) < 1e-12);
  }
  SUBCASE("one dimension, n = 6 (odd half, global sign case)") {
    auto g = make_grid(1, 6, 2.0 * M_PI);
    Field u = sample(g, Side::Physical, [](const std::array<double, 3>& x) {
      return Complex(std::sin(x[0]) + 0.25, 0.5 * std::cos(2.0 * x[0]));
    });
    CHECK(linf_diff(forward_transform(u), oracle::direct_forward(u)) < 1e-13);
  }
  SUBCASE("two dimensions, n = 8") {
    auto g = make_grid(2, 8, 5.0);
    Field f = random_band_limited(g, {0.7 * g->grid_radius(), 1.5, 11});
    Field u = inverse_transform(f);
    CHECK(linf_diff(forward_transform(u), oracle::direct_forward(u)) < 1e-12);
  }
}

TEST_CASE("transforms: round trip and Plancherel") {
  auto g = make_grid(2, 16, 7.0);
  Field f = random_band_limited(g, {0.6 * g->grid_radius(), 2.0, 3});
  Field u = inverse_transform(f);
  CHECK(linf_diff(forward_transform(u), f) < 1e-12 * std::max(1.0, linf(f)));
  CHECK(lattice_lq_norm(u, 2.0) ==
        doctest::Approx(lattice_lq_norm(f, 2.0)).epsilon(1e-10));
}

TEST_CASE("transforms: input contract") {
  auto g = make_grid(1, 8, 2.0);
  Field freq = Field::zeros(g, Side::Frequency);
  CHECK_THROWS_AS(forward_transform(freq), InvalidArgument);
  Field phys = Field::zeros(g, Side::Physical);
  CHECK_THROWS_AS(inverse_transform(phys), InvalidArgument);

  Field masked = Field::zeros(g, Side::Physical);
  masked.overflow.assign(masked.size(), 0);
  masked.overflow[3] = 1;
  CHECK_THROWS_AS(forward_transform(masked), MagnitudeOverflow);

  Field bad = Field::zeros(g, Side::Physical);
  bad.values[2] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(forward_transform(bad), NonFinite);
}

TEST_CASE("field: lattice norms") {
  auto g = make_grid(1, 8, 4.0);
  Field f = Field::zeros(g, Side::Frequency);
  f.values[1] = 3.0;
  f.values[5] = Complex(0.0, -4.0);
  const double cell = g->cell(Side::Frequency);
  CHECK(lattice_lq_norm(f, 1.0) == doctest::Approx(7.0 * cell).epsilon(1e-15));
  CHECK(lattice_lq_norm(f, 2.0) ==
        doctest::Approx(5.0 * std::sqrt(cell)).epsilon(1e-15));
  CHECK(lattice_lq_norm(f, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(lattice_lq_norm(f, 0.5), InvalidArgument);

  // masked modes leave every norm
  f.overflow.assign(f.size(), 0);
  f.overflow[1] = 1;
  CHECK(lattice_lq_norm(f, 1.0) == doctest::Approx(4.0 * cell).epsilon(1e-15));

  auto g2 = make_grid(1, 16, 4.0);
  Field other = Field::zeros(g2, Side::Frequency);
  CHECK_THROWS_AS(require_same_lattice(f, other), GridMismatch);

  CHECK_THROWS_AS(sample(g, Side::Physical,
                         [](const std::array<double, 3>&) {
                           return Complex(std::numeric_limits<double>::infinity(), 0.0);
                         }),
                  NonFinite);
}

TEST_CASE("field files: binary round trip and failure modes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "psidyn_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "sample.field").string();

  auto g = make_grid(2, 4, 3.5);
  Field f = random_band_limited(g, {0.9 * g->grid_radius(), 1.0, 99});
  f.side = Side::Frequency;
  dump_field(f, path);
  Field back = load_field(path);
  CHECK(back.side == Side::Frequency);
  CHECK(*back.grid == *g);
  CHECK(linf_diff(back, f) == 0.0);

  // corrupt the magic
  {
    std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
    io.seekp(0);
    io.put('X');
  }
  CHECK_THROWS_AS(load_field(path), InvalidArgument);

  dump_field(f, path);
  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_THROWS_AS(load_field(path), InvalidArgument);

  dump_field(f, path);
  {
    std::ofstream app(path, std::ios::binary | std::ios::app);
    app.put('\0');
  }
  CHECK_THROWS_AS(load_field(path), InvalidArgument);
}

TEST_CASE("field files: CSV shape") {
  auto g = make_grid(2, 4, 1.0);
  Field f = Field::zeros(g, Side::Physical);
  f.values[0] = Complex(0.1, -2.0);
  const std::string csv = field_csv(f);
  CHECK(csv.rfind("i0,i1,re,im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17); // header + 16 rows
  CHECK(csv.find("0.10000000000000001") != std::string::npos);
  CHECK(csv.find('.') != std::string::npos);
}

TEST_CASE("reports: pinned float formatting and key order") {
  Json j;
  j["zeta"] = 0.1;
  j["alpha"] = 1;
  j["bad"] = std::numeric_limits<double>::quiet_NaN();
  const std::string s = write_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(s.find("zeta") < s.find("alpha"));
  CHECK(s.find("alpha") < s.find("bad"));
}

TEST_CASE("log-scale complex values") {
  const LogComplex a = LogComplex::from_value(Complex(3.0, 4.0));
  CHECK(a.log_mag == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(a.phase == doctest::Approx(std::atan2(4.0, 3.0)).epsilon(1e-15));
  CHECK(std::abs(a.materialize() - Complex(3.0, 4.0)) < 1e-14);

  const LogComplex b = LogComplex::from_exponent(Complex(800.0, 3.0 * M_PI));
  CHECK(b.phase == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK_FALSE(b.materializable());
  CHECK_THROWS_AS(b.materialize(), MagnitudeOverflow);
  CHECK(std::abs(b.materialize_shifted(800.0) - Complex(-1.0, 0.0)) < 1e-12);

  const LogComplex p = a * b;
  CHECK(p.log_mag == doctest::Approx(std::log(5.0) + 800.0).epsilon(1e-12));

  LogComplexSum sum;
  sum.add(LogComplex::from_value(Complex(2.0, 0.0)));
  sum.add(LogComplex::from_value(Complex(3.0, 1.0)));
  CHECK(std::abs(sum.value().materialize() - Complex(5.0, 1.0)) < 1e-13);

  // huge-magnitude cancellation stays on log scale
  LogComplexSum huge;
  huge.add(LogComplex::from_exponent(Complex(800.0, 0.0)));
  huge.add_scaled(LogComplex::from_exponent(Complex(800.0, 0.0)), Complex(-2.0, 0.0));
  const LogComplex r = huge.value();
  CHECK(r.log_mag == doctest::Approx(800.0).epsilon(1e-12));
  CHECK(std::abs(r.phase) == doctest::Approx(M_PI).epsilon(1e-12));

  LogComplexSum zero;
  zero.add_scaled(LogComplex::from_exponent(Complex(100.0, 0.0)), Complex(0.0, 0.0));
  CHECK(zero.value().is_zero());
}

TEST_CASE("quadrature: rules hit their exactness classes") {
  QuadratureSpec gl;
  gl.rule = QuadRule::GaussLegendre;
  gl.order = 4;
  gl.panels = 1;
  const double i7 =
      integrate_real([](double x) { return std::pow(x, 7.0); }, 0.0, 1.0, gl);
  CHECK(i7 == doctest::Approx(0.125).epsilon(1e-14));

  QuadratureSpec simpson;
  simpson.rule = QuadRule::Simpson;
  simpson.panels = 2;
  const double i3 =
      integrate_real([](double x) { return x * x * x; }, 0.0, 2.0, simpson);
  CHECK(i3 == doctest::Approx(4.0).epsilon(1e-14));

  QuadratureSpec trap;
  trap.rule = QuadRule::Trapezoid;
  trap.panels = 64;
  auto sq = [](double x) { return x * x; };
  const double e64 = std::abs(integrate_real(sq, 0.0, 1.0, trap) - 1.0 / 3.0);
  trap.panels = 128;
  const double e128 = std::abs(integrate_real(sq, 0.0, 1.0, trap) - 1.0 / 3.0);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.05));

  QuadratureSpec glc = gl;
  glc.panels = 8;
  const Complex osc = integrate(
      [](double x) { return std::exp(Complex(0.0, 1.0) * x); }, 0.0, 1.0, glc);
  CHECK(std::abs(osc - Complex(std::sin(1.0), 1.0 - std::cos(1.0))) < 1e-12);

  for (QuadRule rule : {QuadRule::Trapezoid, QuadRule::Simpson, QuadRule::GaussLegendre}) {
    QuadratureSpec s;
    s.rule = rule;
    s.panels = 8;
    const QuadNodes nodes = composite_nodes(-1.0, 3.0, s);
    double total = 0.0;
    for (double w : nodes.weights) total += w;
    CHECK(total == doctest::Approx(4.0).epsilon(1e-13));
  }

  QuadratureSpec tight;
  tight.abs_tol = 1e-13;
  tight.panels = 4;
  CHECK(integrate_real_refined([](double x) { return std::exp(-x); }, 0.0, 1.0, tight) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_real_refined(
                      [](double x) { return 1.0 / std::sqrt(x + 1e-300); }, 0.0, 1.0,
                      tight, 6),
                  QuadratureDivergence);
}

TEST_CASE("random fields: seeded, banded, grid-refinement stable") {
  auto g = make_grid(1, 64, 16.0);
  const double band = 0.5 * g->grid_radius();
  Field a = random_band_limited(g, {band, 2.0, 42});
  Field b = random_band_limited(g, {band, 2.0, 42});
  CHECK(linf_diff(a, b) == 0.0);
  Field c = random_band_limited(g, {band, 2.0, 43});
  CHECK(linf(a) > 0.0);
  CHECK(linf_diff(a, c) > 0.0);

  for (std::size_t k = 0; k < a.size(); ++k) {
    if (g->abs2(k, Side::Frequency) > band * band * (1.0 + 1e-12)) {
      CHECK(a.values[k] == Complex(0.0, 0.0));
    }
  }

  // doubling n at fixed extent extends the lattice but keeps the draw
  auto g2 = make_grid(1, 128, 16.0);
  Field fine = random_band_limited(g2, {band, 2.0, 42});
  for (std::size_t k = 0; k < a.size(); ++k) {
    const int off = static_cast<int>(k) - 32;
    const std::size_t k2 = static_cast<std::size_t>(off + 64);
    CHECK(std::abs(a.values[k] - fine.values[k2]) == 0.0);
  }

  CHECK_THROWS_AS(random_band_limited(g, {2.0 * g->grid_radius(), 2.0, 1}),
                  RadiusExceedsGrid);
  CHECK_THROWS_AS(random_band_limited(g, {0.0, 2.0, 1}), InvalidArgument);
}

TEST_CASE("parallel: chunked loops match serial work") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i] += 1;
  });
  for (int h : hits) CHECK(h == 1);

  CHECK_THROWS_AS(parallel_for(10,
                               [&](std::size_t, std::size_t) {
                                 throw InvalidArgument("boom");
                               }),
                  InvalidArgument);

  const int before = thread_count();
  set_thread_count(2);
  CHECK(thread_count() == 2);
  set_thread_count(before);
}
