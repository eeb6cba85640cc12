#include "psidyn/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psidyn/parallel.hpp"
#include "psidyn/transforms.hpp"

namespace psidyn {

LogComplex multiplier(const Symbol& sym, double s, double t,
                      const std::array<double, 3>& xi, const QuadratureSpec& quad,
                      ZeroModePolicy policy) {
  if (!(0.0 <= s && s <= t)) {
    throw InvalidArgument("multiplier requires 0 <= s <= t");
  }
  return LogComplex::from_exponent(symbol_integral(sym, s, t, xi, quad, policy));
}

std::function<Field(double)> tabulated_forcing(std::vector<double> times,
                                               std::vector<Field> fields) {
  if (times.empty() || times.size() != fields.size()) {
    throw InvalidArgument("tabulated forcing needs matching times and fields");
  }
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end()) {
    throw InvalidArgument("tabulated forcing times must be strictly increasing");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].side != Side::Frequency || !fields[i].plain()) {
      throw InvalidArgument("tabulated forcing snapshots must be plain frequency fields");
    }
    require_same_lattice(fields[0], fields[i]);
    require_finite(fields[i], "tabulated_forcing");
  }
  auto t_shared = std::make_shared<std::vector<double>>(std::move(times));
  auto f_shared = std::make_shared<std::vector<Field>>(std::move(fields));
  return [t_shared, f_shared](double t) -> Field {
    const auto& ts = *t_shared;
    const auto& fs = *f_shared;
    if (t <= ts.front()) return fs.front();
    if (t >= ts.back()) return fs.back();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    std::size_t lo = hi - 1;
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    if (std::abs(t - ts[lo]) <= tol) return fs[lo];
    if (std::abs(t - ts[hi]) <= tol) return fs[hi];
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    Field out = fs[lo];
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] = (1.0 - w) * fs[lo].values[k] + w * fs[hi].values[k];
    }
    return out;
  };
}

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& nodes,
                                      std::size_t last) {
  std::vector<double> w(last + 1, 0.0);
  for (std::size_t l = 1; l <= last; ++l) {
    const double h = nodes[l] - nodes[l - 1];
    w[l - 1] += 0.5 * h;
    w[l] += 0.5 * h;
  }
  return w;
}

std::vector<double> simpson_weights(const std::vector<double>& nodes,
                                    std::size_t last) {
  if (last < 2 || last % 2 != 0) {
    throw InvalidArgument("Simpson Duhamel rule needs an even interval count up to each output time");
  }
  const double h = nodes[1] - nodes[0];
  for (std::size_t l = 1; l <= last; ++l) {
    if (std::abs((nodes[l] - nodes[l - 1]) - h) > 1e-9 * std::max(1.0, h)) {
      throw InvalidArgument("Simpson Duhamel rule needs a uniform time mesh");
    }
  }
  std::vector<double> w(last + 1, 0.0);
  for (std::size_t p = 0; p + 2 <= last; p += 2) {
    w[p] += h / 3.0;
    w[p + 1] += 4.0 * h / 3.0;
    w[p + 2] += h / 3.0;
  }
  return w;
}

std::size_t locate_grid_time(const std::vector<double>& mesh, double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(mesh.begin(), mesh.end(), t - tol);
  if (it == mesh.end() || std::abs(*it - t) > tol) {
    throw InvalidArgument("Duhamel mesh does not contain requested output time " +
                          std::to_string(t));
  }
  return static_cast<std::size_t>(it - mesh.begin());
}

Field fetch_forcing(const CauchyProblem& problem, double t) {
  Field f = problem.forcing_hat(t);
  if (f.side != Side::Frequency || !f.plain()) {
    throw InvalidArgument("forcing must produce plain frequency-side fields");
  }
  require_same_lattice(problem.u0_hat, f);
  require_finite(f, "forcing");
  return f;
}

} // namespace

SolutionTrajectory solve(const CauchyProblem& problem,
                         const std::vector<double>& times,
                         const SolveOptions& options) {
  if (!problem.symbol) throw InvalidArgument("solve: problem has no symbol");
  if (!problem.u0_hat.grid) throw InvalidArgument("solve: initial data has no grid");
  if (problem.u0_hat.side != Side::Frequency || !problem.u0_hat.plain()) {
    throw InvalidArgument("solve: initial data must be a plain frequency-side field");
  }
  require_finite(problem.u0_hat, "solve initial data");
  if (!(problem.horizon > 0.0)) throw InvalidArgument("solve: horizon must be positive");
  if (times.empty()) throw InvalidArgument("solve: no output times requested");
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end()) {
    throw InvalidArgument("solve: output times must be strictly increasing");
  }
  if (!(times.front() > 0.0)) throw InvalidArgument("solve: output times must be positive");
  if (times.back() > problem.horizon * (1.0 + 1e-12)) {
    throw InvalidArgument("solve: output times exceed the problem horizon");
  }
  options.symbol_quad.validate();

  const Symbol& sym = *problem.symbol;
  const GridPtr grid = problem.u0_hat.grid;
  const std::size_t total = grid->size();
  const std::size_t nt = times.size();
  const QuadratureSpec& quad = options.symbol_quad;
  const ZeroModePolicy policy = options.zero_mode;
  const bool mesh_rule = options.duhamel.rule != QuadRule::GaussLegendre;
  const bool has_forcing = static_cast<bool>(problem.forcing_hat);

  // Per-time log-scale results (filled in parallel, reduced serially).
  std::vector<std::vector<LogComplex>> result(nt,
                                              std::vector<LogComplex>(total));
  std::vector<std::vector<double>> re_exp(nt, std::vector<double>(total, 0.0));

  if (mesh_rule) {
    std::vector<double> mesh = options.duhamel.mesh;
    if (mesh.empty()) {
      mesh.push_back(0.0);
      mesh.insert(mesh.end(), times.begin(), times.end());
    }
    if (mesh.front() != 0.0) {
      throw InvalidArgument("solve: Duhamel mesh must start at time 0");
    }
    if (!std::is_sorted(mesh.begin(), mesh.end()) ||
        std::adjacent_find(mesh.begin(), mesh.end()) != mesh.end()) {
      throw InvalidArgument("solve: Duhamel mesh must be strictly increasing");
    }

    std::vector<std::size_t> out_index(nt);
    for (std::size_t i = 0; i < nt; ++i) out_index[i] = locate_grid_time(mesh, times[i]);

    std::vector<std::vector<double>> weights(nt);
    if (has_forcing) {
      for (std::size_t i = 0; i < nt; ++i) {
        weights[i] = options.duhamel.rule == QuadRule::Simpson
                         ? simpson_weights(mesh, out_index[i])
                         : trapezoid_weights(mesh, out_index[i]);
      }
    }

    std::vector<Field> f_nodes;
    if (has_forcing) {
      f_nodes.reserve(mesh.size());
      for (double tau : mesh) f_nodes.push_back(fetch_forcing(problem, tau));
    }

    const std::size_t segs = mesh.size() - 1;
    parallel_for(total, [&](std::size_t kb, std::size_t ke) {
      std::vector<Complex> cum(segs + 1);
      for (std::size_t k = kb; k < ke; ++k) {
        const auto xi = grid->point(k, Side::Frequency);
        cum[0] = {0.0, 0.0};
        for (std::size_t l = 1; l <= segs; ++l) {
          cum[l] = cum[l - 1] +
                   symbol_integral(sym, mesh[l - 1], mesh[l], xi, quad, policy);
        }
        for (std::size_t i = 0; i < nt; ++i) {
          const std::size_t m = out_index[i];
          LogComplexSum acc;
          acc.add_scaled(LogComplex::from_exponent(cum[m]),
                         problem.u0_hat.values[k]);
          if (has_forcing) {
            for (std::size_t j = 0; j <= m; ++j) {
              acc.add_scaled(LogComplex::from_exponent(cum[m] - cum[j]),
                             weights[i][j] * f_nodes[j].values[k]);
            }
          }
          result[i][k] = acc.value();
          re_exp[i][k] = cum[m].real();
        }
      }
    });
  } else {
    // Gauss-Legendre Duhamel: fresh composite rule per output time.
    QuadratureSpec gl;
    gl.rule = QuadRule::GaussLegendre;
    gl.order = options.duhamel.order;
    gl.panels = options.duhamel.panels;
    gl.validate();

    for (std::size_t i = 0; i < nt; ++i) {
      QuadNodes qn;
      std::vector<Field> f_nodes;
      if (has_forcing) {
        qn = composite_nodes(0.0, times[i], gl);
        f_nodes.reserve(qn.nodes.size());
        for (double s : qn.nodes) f_nodes.push_back(fetch_forcing(problem, s));
      }
      parallel_for(total, [&](std::size_t kb, std::size_t ke) {
        for (std::size_t k = kb; k < ke; ++k) {
          const auto xi = grid->point(k, Side::Frequency);
          const Complex full =
              symbol_integral(sym, 0.0, times[i], xi, quad, policy);
          LogComplexSum acc;
          acc.add_scaled(LogComplex::from_exponent(full),
                         problem.u0_hat.values[k]);
          if (has_forcing) {
            for (std::size_t q = 0; q < qn.nodes.size(); ++q) {
              const Complex head =
                  symbol_integral(sym, 0.0, qn.nodes[q], xi, quad, policy);
              acc.add_scaled(LogComplex::from_exponent(full - head),
                             qn.weights[q] * f_nodes[q].values[k]);
            }
          }
          result[i][k] = acc.value();
          re_exp[i][k] = full.real();
        }
      });
    }
  }

  // Quadrature error probe at the outermost mode: compare the configured
  // panel count against its doubling. Exactly integrable families give 0.
  std::size_t kstar = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < total; ++k) {
    const double r2 = grid->abs2(k, Side::Frequency);
    if (r2 > best) {
      best = r2;
      kstar = k;
    }
  }
  QuadratureSpec quad2 = quad;
  quad2.panels *= 2;
  const auto xi_star = grid->point(kstar, Side::Frequency);
  std::vector<double> probe(nt, 0.0);
  for (std::size_t i = 0; i < nt; ++i) {
    const Complex a = symbol_integral(sym, 0.0, times[i], xi_star, quad, policy);
    const Complex b = symbol_integral(sym, 0.0, times[i], xi_star, quad2, policy);
    probe[i] = std::abs(a - b);
  }

  SolutionTrajectory traj;
  traj.grid = grid;
  traj.times = times;
  traj.u_hat.reserve(nt);
  traj.diagnostics.resize(nt);

  for (std::size_t i = 0; i < nt; ++i) {
    double max_lm = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < total; ++k) {
      if (!result[i][k].is_zero()) max_lm = std::max(max_lm, result[i][k].log_mag);
    }
    const double shift = (std::isfinite(max_lm) && max_lm >= 700.0) ? max_lm : 0.0;

    Field u = Field::zeros(grid, Side::Frequency);
    u.log_shift = shift;
    std::size_t flagged = 0;
    std::vector<std::uint8_t> mask;
    for (std::size_t k = 0; k < total; ++k) {
      u.values[k] = result[i][k].materialize_shifted(shift);
      if (result[i][k].log_mag >= 700.0) {
        if (mask.empty()) mask.assign(total, 0);
        mask[k] = 1;
        ++flagged;
      }
    }
    if (!mask.empty()) u.overflow = std::move(mask);

    double max_re = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < total; ++k) max_re = std::max(max_re, re_exp[i][k]);

    traj.diagnostics[i].max_re_exponent = max_re;
    traj.diagnostics[i].overflow_count = flagged;
    traj.diagnostics[i].quad_error_estimate = probe[i];
    traj.u_hat.push_back(std::move(u));
  }
  return traj;
}

Field kernel_snapshot(const Symbol& sym, double s, double t, GridPtr grid,
                      const QuadratureSpec& quad, ZeroModePolicy policy) {
  if (!grid) throw InvalidArgument("kernel_snapshot: no grid");
  if (!(0.0 <= s && s <= t)) {
    throw InvalidArgument("kernel_snapshot requires 0 <= s <= t");
  }
  quad.validate();

  const std::size_t total = grid->size();
  std::vector<LogComplex> mult(total);
  parallel_for(total, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      mult[k] = multiplier(sym, s, t, grid->point(k, Side::Frequency), quad, policy);
    }
  });

  std::size_t bad = 0;
  std::string first;
  for (std::size_t k = 0; k < total; ++k) {
    if (!mult[k].materializable()) {
      if (bad < 4) {
        first += (bad ? ", " : "") + std::to_string(k);
      }
      ++bad;
    }
  }
  if (bad > 0) {
    throw KernelOverflow("kernel multiplier exceeds double range at " +
                         std::to_string(bad) + " of " + std::to_string(total) +
                         " modes (flat indices " + first +
                         (bad > 4 ? ", ..." : "") + ")");
  }

  Field m = Field::zeros(grid, Side::Frequency);
  for (std::size_t k = 0; k < total; ++k) m.values[k] = mult[k].materialize();
  Field kernel = inverse_transform(m);
  const double norm = std::pow(2.0 * M_PI, -0.5 * grid->dim());
  for (auto& v : kernel.values) v *= norm;
  return kernel;
}

Field apply_operator(const Symbol& sym, double t, const Field& u_hat,
                     ZeroModePolicy policy) {
  if (!u_hat.grid) throw InvalidArgument("apply_operator: field has no grid");
  if (u_hat.side != Side::Frequency) {
    throw InvalidArgument("apply_operator acts on frequency-side fields");
  }
  require_finite(u_hat, "apply_operator");

  Field out = u_hat;
  const std::size_t total = u_hat.values.size();
  parallel_for(total, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const auto xi = u_hat.grid->point(k, Side::Frequency);
      if (!sym.supported(t, xi)) {
        out.values[k] = {0.0, 0.0};
        continue;
      }
      out.values[k] = symbol_value(sym, t, xi, policy) * u_hat.values[k];
    }
  });
  return out;
}

} // namespace psidyn
