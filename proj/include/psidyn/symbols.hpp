#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "psidyn/field.hpp"
#include "psidyn/quadrature.hpp"
#include "psidyn/report_json.hpp"

namespace psidyn {

// One time-dependent complex coefficient. Three flavors: a constant, a
// piecewise-constant breakpoint table (value[i] on [breaks[i], breaks[i+1]),
// clamped outside), and an arbitrary closure. Constants and tables integrate
// in closed form, which the symbol implementations exploit; closures fall
// back to quadrature.
class Coefficient {
public:
  static Coefficient constant(Complex v);
  static Coefficient table(std::vector<double> breaks, std::vector<Complex> values);
  static Coefficient closure(std::function<Complex(double)> fn,
                             std::string label = "closure");

  Complex at(double t) const;
  bool exact() const { return kind_ != Kind::Closure; }

  // Closed forms; require exact(). integral is the plain antiderivative
  // difference, the abs variants integrate |Re value| and |value| by
  // splitting at breakpoints.
  Complex integral(double s, double t) const;

  // Breakpoints strictly inside (s, t), appended to out in ascending order.
  void split_points(double s, double t, std::vector<double>& out) const;

  Json descriptor() const;

private:
  enum class Kind { Constant, Table, Closure };
  Kind kind_ = Kind::Constant;
  Complex const_value_{0.0, 0.0};
  std::vector<double> breaks_;
  std::vector<Complex> values_;
  std::function<Complex(double)> fn_;
  std::string label_;
};

// Time-measurable frequency-side symbol psi(t, xi). Evaluation is pointwise
// in (t, xi); the integrate hooks exist because the propagator only ever
// consumes time integrals of the symbol, and exact integration (available
// for breakpoint-table coefficients) removes quadrature bias from cocycle
// identities.
class Symbol {
public:
  virtual ~Symbol() = default;

  virtual Complex eval(double t, const std::array<double, 3>& xi) const = 0;

  // integral_s^t psi(r, xi) dr. Default: adaptive quadrature of eval.
  virtual Complex integrate(double s, double t, const std::array<double, 3>& xi,
                            const QuadratureSpec& quad) const;

  // integral_s^t |Re psi| dr and integral_s^t |psi| dr. Defaults quadrature;
  // piecewise-constant families override with exact splits.
  virtual double integrate_abs_re(double s, double t,
                                  const std::array<double, 3>& xi,
                                  const QuadratureSpec& quad) const;
  virtual double integrate_abs(double s, double t, const std::array<double, 3>& xi,
                               const QuadratureSpec& quad) const;

  // Where false, the operator acts as zero regardless of the field value.
  virtual bool supported(double t, const std::array<double, 3>& xi) const {
    (void)t;
    (void)xi;
    return true;
  }

  virtual std::string family() const = 0;

  // {family, parameters, branch} block embedded in every report.
  virtual Json descriptor() const = 0;
};

using SymbolPtr = std::shared_ptr<const Symbol>;

// psi(t, xi) = -sum_ij a_ij(t) xi_i xi_j + i sum_j b_j(t) xi_j + c(t).
// No sign or ellipticity restriction on the coefficients; that freedom (a
// changing sign in time) is the whole point of the solver.
class SecondOrderSymbol : public Symbol {
public:
  SecondOrderSymbol(int dim, std::vector<Coefficient> a_row_major,
                    std::vector<Coefficient> b, Coefficient c);

  Complex eval(double t, const std::array<double, 3>& xi) const override;
  Complex integrate(double s, double t, const std::array<double, 3>& xi,
                    const QuadratureSpec& quad) const override;
  double integrate_abs_re(double s, double t, const std::array<double, 3>& xi,
                          const QuadratureSpec& quad) const override;
  double integrate_abs(double s, double t, const std::array<double, 3>& xi,
                       const QuadratureSpec& quad) const override;
  std::string family() const override { return "second_order"; }
  Json descriptor() const override;

  int dim() const { return dim_; }
  const Coefficient& a(int i, int j) const { return a_[i * dim_ + j]; }
  const Coefficient& b(int j) const { return b_[j]; }
  const Coefficient& c() const { return c_; }

private:
  bool all_exact() const;
  int dim_;
  std::vector<Coefficient> a_;
  std::vector<Coefficient> b_;
  Coefficient c_;
};

// Inner symbol of the logarithmic family. time_constant marks inners that do
// not depend on t, which unlocks exact time integration when the outer
// coefficient is exact.
struct InnerSymbol {
  std::function<Complex(double, const std::array<double, 3>&)> eval;
  bool time_constant = false;
  Json meta;

  // |xi|^2, the inner symbol of the logarithmic Laplacian.
  static InnerSymbol abs2();
  // General quadratic form sum_ij alpha_ij(t) xi_i xi_j.
  static InnerSymbol quadratic_form(int dim, std::vector<Coefficient> alpha_row_major);
};

// psi(t, xi) = beta(t) * Log(inner(t, xi)) on the principal branch
// (imaginary part in (-pi, pi]). Evaluation throws ZeroArgument where the
// inner symbol vanishes; what to do about that mode is the caller's policy.
class LogSymbol : public Symbol {
public:
  LogSymbol(Coefficient beta, InnerSymbol inner, std::string family = "log");

  Complex eval(double t, const std::array<double, 3>& xi) const override;
  Complex integrate(double s, double t, const std::array<double, 3>& xi,
                    const QuadratureSpec& quad) const override;
  double integrate_abs_re(double s, double t, const std::array<double, 3>& xi,
                          const QuadratureSpec& quad) const override;
  double integrate_abs(double s, double t, const std::array<double, 3>& xi,
                       const QuadratureSpec& quad) const override;
  std::string family() const override { return family_; }
  Json descriptor() const override;

  const Coefficient& beta() const { return beta_; }
  const InnerSymbol& inner() const { return inner_; }

private:
  // Principal log of the inner value at (t, xi); ZeroArgument at zeros.
  Complex principal_log_inner(double t, const std::array<double, 3>& xi) const;

  Coefficient beta_;
  InnerSymbol inner_;
  std::string family_;
};

// beta == 1, inner |xi|^2: the logarithmic Laplacian symbol log(|xi|^2).
std::shared_ptr<const LogSymbol> log_laplacian();

// Symbol given as lattice tables: value tables[i] on time interval
// [breaks[i], breaks[i+1]), each table one frequency-side value per lattice
// point. Evaluation off the lattice is an error; nothing in the pipeline
// does that.
class TabulatedSymbol : public Symbol {
public:
  TabulatedSymbol(GridPtr grid, std::vector<double> breaks,
                  std::vector<std::vector<Complex>> tables);

  Complex eval(double t, const std::array<double, 3>& xi) const override;
  Complex integrate(double s, double t, const std::array<double, 3>& xi,
                    const QuadratureSpec& quad) const override;
  double integrate_abs_re(double s, double t, const std::array<double, 3>& xi,
                          const QuadratureSpec& quad) const override;
  double integrate_abs(double s, double t, const std::array<double, 3>& xi,
                       const QuadratureSpec& quad) const override;
  std::string family() const override { return "tabulated"; }
  Json descriptor() const override;

private:
  std::size_t flat_index(const std::array<double, 3>& xi) const;
  template <typename Map>
  double piecewise_abs_integral(double s, double t, std::size_t flat, Map map) const;

  GridPtr grid_;
  std::vector<double> breaks_;
  std::vector<std::vector<Complex>> tables_;
};

// What to do at modes where the symbol has no value (the inner symbol of a
// log family vanishes there): treat the symbol as 0 at that mode, or refuse.
enum class ZeroModePolicy { Drop, Error };

// Policy-aware wrappers used by the propagator and the condition checkers.
Complex symbol_value(const Symbol& sym, double t, const std::array<double, 3>& xi,
                     ZeroModePolicy policy);
Complex symbol_integral(const Symbol& sym, double s, double t,
                        const std::array<double, 3>& xi, const QuadratureSpec& quad,
                        ZeroModePolicy policy);
double symbol_integral_abs_re(const Symbol& sym, double s, double t,
                              const std::array<double, 3>& xi,
                              const QuadratureSpec& quad, ZeroModePolicy policy);
double symbol_integral_abs(const Symbol& sym, double s, double t,
                           const std::array<double, 3>& xi,
                           const QuadratureSpec& quad, ZeroModePolicy policy);

// Contract entry point: integral_s^t psi(r, xi) dr with 0 <= s <= t checked.
Complex integrate_symbol(const Symbol& sym, double s, double t,
                         const std::array<double, 3>& xi,
                         const QuadratureSpec& quad);

} // namespace psidyn
