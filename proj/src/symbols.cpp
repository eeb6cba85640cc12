#include "psidyn/symbols.hpp"

#include <algorithm>
#include <cmath>

namespace psidyn {

namespace {

Json complex_json(Complex v) { return Json::array({v.real(), v.imag()}); }

// Exact integral of a piecewise-constant map over [s, t]: split at the given
// interior knots and evaluate in each open piece (midpoint is as good as any
// interior point).
double piecewise_integral(double s, double t, std::vector<double> splits,
                          const std::function<double(double)>& value) {
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  double acc = 0.0;
  double lo = s;
  for (double knot : splits) {
    if (knot <= lo || knot >= t) continue;
    acc += value(0.5 * (lo + knot)) * (knot - lo);
    lo = knot;
  }
  if (t > lo) acc += value(0.5 * (lo + t)) * (t - lo);
  return acc;
}

Complex piecewise_integral_c(double s, double t, std::vector<double> splits,
                             const std::function<Complex(double)>& value) {
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  Complex acc{0.0, 0.0};
  double lo = s;
  for (double knot : splits) {
    if (knot <= lo || knot >= t) continue;
    acc += value(0.5 * (lo + knot)) * (knot - lo);
    lo = knot;
  }
  if (t > lo) acc += value(0.5 * (lo + t)) * (t - lo);
  return acc;
}

} // namespace

//----------------------------------------------------------------------------
// Coefficient

Coefficient Coefficient::constant(Complex v) {
  Coefficient c;
  c.kind_ = Kind::Constant;
  c.const_value_ = v;
  return c;
}

Coefficient Coefficient::table(std::vector<double> breaks,
                               std::vector<Complex> values) {
  if (breaks.size() != values.size() + 1 || values.empty()) {
    throw InvalidArgument("coefficient table needs k values and k+1 breakpoints");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end()) {
    throw InvalidArgument("coefficient breakpoints must be strictly increasing");
  }
  Coefficient c;
  c.kind_ = Kind::Table;
  c.breaks_ = std::move(breaks);
  c.values_ = std::move(values);
  return c;
}

Coefficient Coefficient::closure(std::function<Complex(double)> fn,
                                 std::string label) {
  Coefficient c;
  c.kind_ = Kind::Closure;
  c.fn_ = std::move(fn);
  c.label_ = std::move(label);
  return c;
}

Complex Coefficient::at(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return const_value_;
    case Kind::Closure:
      return fn_(t);
    case Kind::Table: {
      if (t < breaks_.front()) return values_.front();
      if (t >= breaks_.back()) return values_.back();
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
      return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }
  }
  return {};
}

Complex Coefficient::integral(double s, double t) const {
  switch (kind_) {
    case Kind::Constant:
      return const_value_ * (t - s);
    case Kind::Table: {
      std::vector<double> splits(breaks_.begin(), breaks_.end());
      return piecewise_integral_c(s, t, std::move(splits),
                                  [this](double r) { return at(r); });
    }
    case Kind::Closure:
      throw InvalidArgument("closure coefficient has no closed-form integral");
  }
  return {};
}

void Coefficient::split_points(double s, double t, std::vector<double>& out) const {
  if (kind_ != Kind::Table) return;
  for (double b : breaks_) {
    if (b > s && b < t) out.push_back(b);
  }
}

Json Coefficient::descriptor() const {
  switch (kind_) {
    case Kind::Constant:
      return complex_json(const_value_);
    case Kind::Table: {
      Json j;
      j["breaks"] = breaks_;
      Json vals = Json::array();
      for (Complex v : values_) vals.push_back(complex_json(v));
      j["values"] = std::move(vals);
      return j;
    }
    case Kind::Closure:
      return Json(label_);
  }
  return {};
}

//----------------------------------------------------------------------------
// Symbol defaults

Complex Symbol::integrate(double s, double t, const std::array<double, 3>& xi,
                          const QuadratureSpec& quad) const {
  if (t == s) return {0.0, 0.0};
  return integrate_refined([&](double r) { return eval(r, xi); }, s, t, quad);
}

double Symbol::integrate_abs_re(double s, double t, const std::array<double, 3>& xi,
                                const QuadratureSpec& quad) const {
  if (t == s) return 0.0;
  return integrate_real_refined(
      [&](double r) { return std::abs(eval(r, xi).real()); }, s, t, quad);
}

double Symbol::integrate_abs(double s, double t, const std::array<double, 3>& xi,
                             const QuadratureSpec& quad) const {
  if (t == s) return 0.0;
  return integrate_real_refined([&](double r) { return std::abs(eval(r, xi)); },
                                s, t, quad);
}

//----------------------------------------------------------------------------
// SecondOrderSymbol

SecondOrderSymbol::SecondOrderSymbol(int dim, std::vector<Coefficient> a_row_major,
                                     std::vector<Coefficient> b, Coefficient c)
    : dim_(dim), a_(std::move(a_row_major)), b_(std::move(b)), c_(std::move(c)) {
  if (dim_ < 1 || dim_ > 3) throw BadDim("second-order symbol dimension must be 1..3");
  if (a_.size() != static_cast<std::size_t>(dim_ * dim_) ||
      b_.size() != static_cast<std::size_t>(dim_)) {
    throw InvalidArgument("second-order symbol needs dim^2 a-coefficients and dim b-coefficients");
  }
}

bool SecondOrderSymbol::all_exact() const {
  for (const auto& q : a_) {
    if (!q.exact()) return false;
  }
  for (const auto& q : b_) {
    if (!q.exact()) return false;
  }
  return c_.exact();
}

Complex SecondOrderSymbol::eval(double t, const std::array<double, 3>& xi) const {
  Complex quad{0.0, 0.0};
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) quad += a(i, j).at(t) * (xi[i] * xi[j]);
  }
  Complex lin{0.0, 0.0};
  for (int j = 0; j < dim_; ++j) lin += b_[j].at(t) * xi[j];
  return -quad + Complex(0.0, 1.0) * lin + c_.at(t);
}

Complex SecondOrderSymbol::integrate(double s, double t,
                                     const std::array<double, 3>& xi,
                                     const QuadratureSpec& quad) const {
  if (!all_exact()) return Symbol::integrate(s, t, xi, quad);
  Complex qsum{0.0, 0.0};
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) qsum += a(i, j).integral(s, t) * (xi[i] * xi[j]);
  }
  Complex lsum{0.0, 0.0};
  for (int j = 0; j < dim_; ++j) lsum += b_[j].integral(s, t) * xi[j];
  return -qsum + Complex(0.0, 1.0) * lsum + c_.integral(s, t);
}

double SecondOrderSymbol::integrate_abs_re(double s, double t,
                                           const std::array<double, 3>& xi,
                                           const QuadratureSpec& quad) const {
  if (!all_exact()) return Symbol::integrate_abs_re(s, t, xi, quad);
  std::vector<double> splits;
  for (const auto& q : a_) q.split_points(s, t, splits);
  for (const auto& q : b_) q.split_points(s, t, splits);
  c_.split_points(s, t, splits);
  return piecewise_integral(s, t, std::move(splits), [&](double r) {
    return std::abs(eval(r, xi).real());
  });
}

double SecondOrderSymbol::integrate_abs(double s, double t,
                                        const std::array<double, 3>& xi,
                                        const QuadratureSpec& quad) const {
  if (!all_exact()) return Symbol::integrate_abs(s, t, xi, quad);
  std::vector<double> splits;
  for (const auto& q : a_) q.split_points(s, t, splits);
  for (const auto& q : b_) q.split_points(s, t, splits);
  c_.split_points(s, t, splits);
  return piecewise_integral(s, t, std::move(splits),
                            [&](double r) { return std::abs(eval(r, xi)); });
}

Json SecondOrderSymbol::descriptor() const {
  Json j;
  j["family"] = family();
  Json a_rows = Json::array();
  for (int i = 0; i < dim_; ++i) {
    Json row = Json::array();
    for (int jj = 0; jj < dim_; ++jj) row.push_back(a(i, jj).descriptor());
    a_rows.push_back(std::move(row));
  }
  Json b_row = Json::array();
  for (int jj = 0; jj < dim_; ++jj) b_row.push_back(b_[jj].descriptor());
  j["parameters"] = Json{{"dim", dim_},
                         {"a", std::move(a_rows)},
                         {"b", std::move(b_row)},
                         {"c", c_.descriptor()}};
  return j;
}

//----------------------------------------------------------------------------
// LogSymbol

InnerSymbol InnerSymbol::abs2() {
  InnerSymbol s;
  s.eval = [](double, const std::array<double, 3>& xi) {
    return Complex(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2], 0.0);
  };
  s.time_constant = true;
  s.meta = Json{{"kind", "abs2"}};
  return s;
}

InnerSymbol InnerSymbol::quadratic_form(int dim,
                                        std::vector<Coefficient> alpha_row_major) {
  if (dim < 1 || dim > 3 ||
      alpha_row_major.size() != static_cast<std::size_t>(dim * dim)) {
    throw InvalidArgument("quadratic-form inner symbol needs dim^2 coefficients");
  }
  InnerSymbol s;
  Json desc = Json::array();
  bool constant = true;
  for (int i = 0; i < dim; ++i) {
    Json row = Json::array();
    for (int j = 0; j < dim; ++j) {
      const auto& q = alpha_row_major[static_cast<std::size_t>(i * dim + j)];
      row.push_back(q.descriptor());
      constant = constant && q.exact() && q.descriptor().is_array();
    }
    desc.push_back(std::move(row));
  }
  auto coeffs = std::make_shared<std::vector<Coefficient>>(std::move(alpha_row_major));
  s.eval = [dim, coeffs](double t, const std::array<double, 3>& xi) {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        acc += (*coeffs)[static_cast<std::size_t>(i * dim + j)].at(t) *
               (xi[i] * xi[j]);
      }
    }
    return acc;
  };
  s.time_constant = constant;
  s.meta = Json{{"kind", "quadratic_form"}, {"alpha", std::move(desc)}};
  return s;
}

LogSymbol::LogSymbol(Coefficient beta, InnerSymbol inner, std::string family)
    : beta_(std::move(beta)), inner_(std::move(inner)), family_(std::move(family)) {}

Complex LogSymbol::principal_log_inner(double t,
                                       const std::array<double, 3>& xi) const {
  Complex w = inner_.eval(t, xi);
  if (w.real() == 0.0 && w.imag() == 0.0) {
    throw ZeroArgument("logarithmic symbol has no value where the inner symbol vanishes (xi = (" +
                       std::to_string(xi[0]) + ", " + std::to_string(xi[1]) + ", " +
                       std::to_string(xi[2]) + "))");
  }
  double ph = std::arg(w);
  if (ph <= -M_PI) ph = M_PI; // keep the branch half-open at +pi
  return {std::log(std::abs(w)), ph};
}

Complex LogSymbol::eval(double t, const std::array<double, 3>& xi) const {
  return beta_.at(t) * principal_log_inner(t, xi);
}

Complex LogSymbol::integrate(double s, double t, const std::array<double, 3>& xi,
                             const QuadratureSpec& quad) const {
  if (inner_.time_constant && beta_.exact()) {
    return beta_.integral(s, t) * principal_log_inner(s, xi);
  }
  return Symbol::integrate(s, t, xi, quad);
}

double LogSymbol::integrate_abs_re(double s, double t,
                                   const std::array<double, 3>& xi,
                                   const QuadratureSpec& quad) const {
  if (inner_.time_constant && beta_.exact()) {
    Complex L = principal_log_inner(s, xi);
    std::vector<double> splits;
    beta_.split_points(s, t, splits);
    return piecewise_integral(s, t, std::move(splits), [&](double r) {
      return std::abs((beta_.at(r) * L).real());
    });
  }
  return Symbol::integrate_abs_re(s, t, xi, quad);
}

double LogSymbol::integrate_abs(double s, double t, const std::array<double, 3>& xi,
                                const QuadratureSpec& quad) const {
  if (inner_.time_constant && beta_.exact()) {
    Complex L = principal_log_inner(s, xi);
    std::vector<double> splits;
    beta_.split_points(s, t, splits);
    return piecewise_integral(s, t, std::move(splits), [&](double r) {
      return std::abs(beta_.at(r) * L);
    });
  }
  return Symbol::integrate_abs(s, t, xi, quad);
}

Json LogSymbol::descriptor() const {
  Json j;
  j["family"] = family_;
  j["parameters"] = Json{{"beta", beta_.descriptor()}, {"inner", inner_.meta}};
  j["branch"] = "principal";
  return j;
}

std::shared_ptr<const LogSymbol> log_laplacian() {
  return std::make_shared<const LogSymbol>(Coefficient::constant({1.0, 0.0}),
                                           InnerSymbol::abs2(), "log_laplacian");
}

//----------------------------------------------------------------------------
// TabulatedSymbol

TabulatedSymbol::TabulatedSymbol(GridPtr grid, std::vector<double> breaks,
                                 std::vector<std::vector<Complex>> tables)
    : grid_(std::move(grid)), breaks_(std::move(breaks)), tables_(std::move(tables)) {
  if (breaks_.size() != tables_.size() + 1 || tables_.empty()) {
    throw InvalidArgument("tabulated symbol needs k tables and k+1 breakpoints");
  }
  if (!std::is_sorted(breaks_.begin(), breaks_.end()) ||
      std::adjacent_find(breaks_.begin(), breaks_.end()) != breaks_.end()) {
    throw InvalidArgument("tabulated symbol breakpoints must be strictly increasing");
  }
  for (const auto& tab : tables_) {
    if (tab.size() != grid_->size()) {
      throw GridMismatch("tabulated symbol table size does not match the grid");
    }
  }
}

std::size_t TabulatedSymbol::flat_index(const std::array<double, 3>& xi) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < grid_->dim(); ++a) {
    double pos = xi[a] / grid_->dxi() + 0.5 * grid_->n();
    int j = static_cast<int>(std::lround(pos));
    if (j < 0 || j >= grid_->n() ||
        std::abs(xi[a] - grid_->coord(j, Side::Frequency)) >
            1e-9 * std::max(1.0, std::abs(xi[a]))) {
      throw InvalidArgument("tabulated symbol evaluated off the frequency lattice");
    }
    idx[a] = j;
  }
  return grid_->ravel(idx);
}

Complex TabulatedSymbol::eval(double t, const std::array<double, 3>& xi) const {
  const std::size_t flat = flat_index(xi);
  std::size_t i;
  if (t < breaks_.front()) {
    i = 0;
  } else if (t >= breaks_.back()) {
    i = tables_.size() - 1;
  } else {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }
  return tables_[i][flat];
}

template <typename Map>
double TabulatedSymbol::piecewise_abs_integral(double s, double t, std::size_t flat,
                                               Map map) const {
  std::vector<double> splits;
  for (double b : breaks_) {
    if (b > s && b < t) splits.push_back(b);
  }
  return piecewise_integral(s, t, std::move(splits), [&](double r) {
    std::size_t i;
    if (r < breaks_.front()) {
      i = 0;
    } else if (r >= breaks_.back()) {
      i = tables_.size() - 1;
    } else {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
      i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }
    return map(tables_[i][flat]);
  });
}

Complex TabulatedSymbol::integrate(double s, double t,
                                   const std::array<double, 3>& xi,
                                   const QuadratureSpec&) const {
  const std::size_t flat = flat_index(xi);
  std::vector<double> splits;
  for (double b : breaks_) {
    if (b > s && b < t) splits.push_back(b);
  }
  return piecewise_integral_c(s, t, std::move(splits), [&](double r) {
    return eval(r, grid_->point(flat, Side::Frequency));
  });
}

double TabulatedSymbol::integrate_abs_re(double s, double t,
                                         const std::array<double, 3>& xi,
                                         const QuadratureSpec&) const {
  return piecewise_abs_integral(s, t, flat_index(xi),
                                [](Complex v) { return std::abs(v.real()); });
}

double TabulatedSymbol::integrate_abs(double s, double t,
                                      const std::array<double, 3>& xi,
                                      const QuadratureSpec&) const {
  return piecewise_abs_integral(s, t, flat_index(xi),
                                [](Complex v) { return std::abs(v); });
}

Json TabulatedSymbol::descriptor() const {
  Json j;
  j["family"] = family();
  j["parameters"] = Json{{"breaks", breaks_},
                         {"intervals", tables_.size()},
                         {"grid", Json{{"dim", grid_->dim()},
                                       {"n", grid_->n()},
                                       {"extent", grid_->extent()}}}};
  return j;
}

//----------------------------------------------------------------------------
// Policy wrappers

Complex symbol_value(const Symbol& sym, double t, const std::array<double, 3>& xi,
                     ZeroModePolicy policy) {
  try {
    return sym.eval(t, xi);
  } catch (const ZeroArgument&) {
    if (policy == ZeroModePolicy::Drop) return {0.0, 0.0};
    throw;
  }
}

Complex symbol_integral(const Symbol& sym, double s, double t,
                        const std::array<double, 3>& xi, const QuadratureSpec& quad,
                        ZeroModePolicy policy) {
  try {
    return sym.integrate(s, t, xi, quad);
  } catch (const ZeroArgument&) {
    if (policy == ZeroModePolicy::Drop) return {0.0, 0.0};
    throw;
  }
}

double symbol_integral_abs_re(const Symbol& sym, double s, double t,
                              const std::array<double, 3>& xi,
                              const QuadratureSpec& quad, ZeroModePolicy policy) {
  try {
    return sym.integrate_abs_re(s, t, xi, quad);
  } catch (const ZeroArgument&) {
    if (policy == ZeroModePolicy::Drop) return 0.0;
    throw;
  }
}

double symbol_integral_abs(const Symbol& sym, double s, double t,
                           const std::array<double, 3>& xi,
                           const QuadratureSpec& quad, ZeroModePolicy policy) {
  try {
    return sym.integrate_abs(s, t, xi, quad);
  } catch (const ZeroArgument&) {
    if (policy == ZeroModePolicy::Drop) return 0.0;
    throw;
  }
}

Complex integrate_symbol(const Symbol& sym, double s, double t,
                         const std::array<double, 3>& xi,
                         const QuadratureSpec& quad) {
  if (!(0.0 <= s && s <= t)) {
    throw InvalidArgument("symbol integration requires 0 <= s <= t");
  }
  return sym.integrate(s, t, xi, quad);
}

} // namespace psidyn
