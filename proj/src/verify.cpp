#include "psidyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>

#include "psidyn/parallel.hpp"

namespace psidyn {

namespace {

// Per-mode plain value of a possibly shifted field. nullopt when the mode is
// overflow-masked or the shifted magnitude exceeds double range.
std::optional<Complex> materialize_mode(const Field& f, std::size_t k) {
  if (f.masked(k)) return std::nullopt;
  const Complex v = f.values[k];
  if (f.log_shift == 0.0) return v;
  const double av = std::abs(v);
  if (av == 0.0) return Complex(0.0, 0.0);
  const double lm = f.log_shift + std::log(av);
  if (!(lm < 700.0)) return std::nullopt;
  return std::polar(std::exp(lm), std::arg(v));
}

// Trapezoid weights for nodes[0..last] (nonuniform spacing allowed).
std::vector<double> trapezoid_prefix(const std::vector<double>& nodes, std::size_t last) {
  std::vector<double> w(last + 1, 0.0);
  for (std::size_t j = 0; j < last; ++j) {
    const double h = nodes[j + 1] - nodes[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

// Composite Simpson weights for nodes[0..last] on a uniform mesh; an odd
// interval count gets Simpson on the even part plus a trapezoid tail.
std::vector<double> simpson_prefix(const std::vector<double>& nodes, std::size_t last) {
  std::vector<double> w(last + 1, 0.0);
  if (last == 0) return w;
  const double h = (nodes[last] - nodes[0]) / static_cast<double>(last);
  for (std::size_t j = 1; j <= last; ++j) {
    if (std::abs(nodes[j] - nodes[j - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InvalidArgument("Simpson residual quadrature needs a uniform trajectory mesh");
    }
  }
  const std::size_t even_part = (last % 2 == 0) ? last : last - 1;
  for (std::size_t p = 0; p + 2 <= even_part; p += 2) {
    w[p] += h / 3.0;
    w[p + 1] += 4.0 * h / 3.0;
    w[p + 2] += h / 3.0;
  }
  if (last % 2 == 1) {
    w[last - 1] += 0.5 * h;
    w[last] += 0.5 * h;
  }
  return w;
}

std::vector<double> prefix_weights(QuadRule rule, const std::vector<double>& nodes,
                                   std::size_t last) {
  switch (rule) {
    case QuadRule::Trapezoid:
      return trapezoid_prefix(nodes, last);
    case QuadRule::Simpson:
      return simpson_prefix(nodes, last);
    default:
      throw InvalidArgument(
          "residual quadrature runs on the trajectory mesh: trapezoid or Simpson");
  }
}

void validate_trajectory(const SolutionTrajectory& traj, const CauchyProblem& problem,
                         const char* who) {
  if (!traj.grid || traj.times.empty() || traj.u_hat.size() != traj.times.size()) {
    throw InvalidArgument(std::string(who) + ": malformed trajectory");
  }
  if (traj.times.size() < 3) {
    throw InsufficientTimes(std::string(who) + ": need at least 3 snapshots, got " +
                            std::to_string(traj.times.size()));
  }
  if (!problem.symbol) throw InvalidArgument(std::string(who) + ": no symbol");
  if (!problem.u0_hat.grid || problem.u0_hat.side != Side::Frequency ||
      !problem.u0_hat.plain()) {
    throw InvalidArgument(std::string(who) +
                          ": initial data must be a plain frequency-side field");
  }
  require_same_lattice(problem.u0_hat, traj.u_hat.front());
  for (const Field& f : traj.u_hat) {
    if (f.side != Side::Frequency) {
      throw InvalidArgument(std::string(who) + ": trajectory must be frequency-side");
    }
  }
}

// Snapshot fields of the forcing at the residual mesh nodes (0 and the
// trajectory times); empty when the problem has no forcing.
std::vector<Field> forcing_nodes(const CauchyProblem& problem,
                                 const std::vector<double>& nodes) {
  std::vector<Field> out;
  if (!problem.forcing_hat) return out;
  out.reserve(nodes.size());
  for (double s : nodes) {
    Field f = problem.forcing_hat(s);
    if (f.side != Side::Frequency || !f.plain()) {
      throw InvalidArgument("forcing must produce plain frequency-side fields");
    }
    require_same_lattice(problem.u0_hat, f);
    require_finite(f, "residual forcing");
    out.push_back(std::move(f));
  }
  return out;
}

struct ResidualCore {
  std::vector<double> nodes;                  // 0, t_1, ..., t_T
  std::vector<std::vector<double>> weights;   // weights[i] covers nodes[0..i+1]
  std::vector<Field> forcing;                 // per node, empty if none
};

ResidualCore make_core(const SolutionTrajectory& traj, const CauchyProblem& problem,
                       const ResidualOptions& opts) {
  ResidualCore core;
  core.nodes.reserve(traj.times.size() + 1);
  core.nodes.push_back(0.0);
  core.nodes.insert(core.nodes.end(), traj.times.begin(), traj.times.end());
  core.weights.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    core.weights.push_back(prefix_weights(opts.rule, core.nodes, i + 1));
  }
  core.forcing = forcing_nodes(problem, core.nodes);
  return core;
}

// Per-mode residual sweep. For mode k produces residual values R(t_i, k) for
// every time whose prefix is fully representable at k, reporting exclusions
// through the `excluded` flags.
template <typename Sink>
void mode_residuals(const SolutionTrajectory& traj, const CauchyProblem& problem,
                    const ResidualCore& core, const ResidualOptions& opts,
                    std::size_t k, Sink&& sink) {
  const SpectralGrid& g = *traj.grid;
  const Symbol& sym = *problem.symbol;
  const auto xi = g.point(k, Side::Frequency);
  const std::size_t T = traj.times.size();

  std::vector<Complex> u(T + 1);
  u[0] = problem.u0_hat.values[k];
  std::size_t good_until = T + 1;
  for (std::size_t i = 0; i < T; ++i) {
    const auto v = materialize_mode(traj.u_hat[i], k);
    if (!v) {
      good_until = i + 1;
      break;
    }
    u[i + 1] = *v;
  }

  std::vector<Complex> psi(T + 1);
  for (std::size_t j = 0; j < std::min(good_until, T + 1); ++j) {
    psi[j] = symbol_value(sym, core.nodes[j], xi, opts.zero_mode);
  }

  for (std::size_t i = 0; i < T; ++i) {
    if (i + 1 >= good_until) {
      sink(i, Complex{}, true);
      continue;
    }
    const std::vector<double>& w = core.weights[i];
    Complex quad_psi_u{0.0, 0.0};
    Complex quad_f{0.0, 0.0};
    for (std::size_t j = 0; j < w.size(); ++j) {
      quad_psi_u += w[j] * psi[j] * u[j];
      if (!core.forcing.empty()) quad_f += w[j] * core.forcing[j].values[k];
    }
    const Complex r = u[i + 1] - u[0] - quad_psi_u - quad_f;
    sink(i, r, false);
  }
}

} // namespace

TestFunction make_bump(GridPtr grid, double R0) {
  if (!grid) throw InvalidArgument("make_bump: no grid");
  if (!(R0 > 0.0)) throw InvalidArgument("bump radius must be positive");
  if (!(R0 < grid->grid_radius())) {
    throw SupportExceedsGrid("bump radius " + std::to_string(R0) +
                             " must stay strictly inside the grid radius " +
                             std::to_string(grid->grid_radius()));
  }
  TestFunction phi;
  phi.radius = R0;
  phi.hat = Field::zeros(grid, Side::Frequency);
  const double r2max = R0 * R0;
  double mass = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double r2 = grid->abs2(k, Side::Frequency) / r2max;
    if (r2 < 1.0) {
      const double v = std::exp(-1.0 / (1.0 - r2));
      phi.hat.values[k] = Complex(v, 0.0);
      mass += v;
    }
  }
  phi.l1_mass = mass * grid->cell(Side::Frequency);
  return phi;
}

Json ResidualReport::to_json() const {
  Json j;
  j["kind"] = kind;
  j["times"] = times;
  j["residuals"] = residuals;
  j["excluded_modes"] = excluded_modes;
  j["details"] = details;
  return j;
}

ResidualReport representation_residual(const SolutionTrajectory& traj,
                                       const CauchyProblem& problem,
                                       const ResidualOptions& opts) {
  validate_trajectory(traj, problem, "representation_residual");
  const ResidualCore core = make_core(traj, problem, opts);
  const std::size_t T = traj.times.size();
  const std::size_t modes = traj.grid->size();

  std::vector<double> worst(T, 0.0);
  std::vector<std::size_t> excluded(T, 0);
  std::mutex merge;
  parallel_for(modes, [&](std::size_t b, std::size_t e) {
    std::vector<double> local_worst(T, 0.0);
    std::vector<std::size_t> local_excl(T, 0);
    for (std::size_t k = b; k < e; ++k) {
      mode_residuals(traj, problem, core, opts, k,
                     [&](std::size_t i, const Complex& r, bool skip) {
                       if (skip) {
                         ++local_excl[i];
                       } else {
                         local_worst[i] = std::max(local_worst[i], std::abs(r));
                       }
                     });
    }
    std::lock_guard<std::mutex> lock(merge);
    for (std::size_t i = 0; i < T; ++i) {
      worst[i] = std::max(worst[i], local_worst[i]);
      excluded[i] += local_excl[i];
    }
  });

  ResidualReport rep;
  rep.kind = "representation";
  rep.times = traj.times;
  rep.residuals = std::move(worst);
  rep.excluded_modes = std::move(excluded);
  rep.details = Json{{"rule", opts.rule == QuadRule::Simpson ? "simpson" : "trapezoid"},
                     {"mode_count", modes},
                     {"max_residual",
                      *std::max_element(rep.residuals.begin(), rep.residuals.end())}};
  return rep;
}

ResidualReport weak_form_residual(const SolutionTrajectory& traj,
                                  const CauchyProblem& problem,
                                  const TestFunction& phi,
                                  const ResidualOptions& opts) {
  validate_trajectory(traj, problem, "weak_form_residual");
  if (!phi.hat.grid) throw InvalidArgument("weak_form_residual: empty test function");
  require_same_lattice(problem.u0_hat, phi.hat);
  const ResidualCore core = make_core(traj, problem, opts);
  const std::size_t T = traj.times.size();
  const double cell = traj.grid->cell(Side::Frequency);

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < phi.hat.size(); ++k) {
    if (phi.hat.values[k] != Complex(0.0, 0.0)) support.push_back(k);
  }

  std::vector<Complex> paired(T, Complex{0.0, 0.0});
  std::vector<std::size_t> excluded(T, 0);
  for (std::size_t k : support) {
    const Complex conj_phi = std::conj(phi.hat.values[k]);
    mode_residuals(traj, problem, core, opts, k,
                   [&](std::size_t i, const Complex& r, bool skip) {
                     if (skip) {
                       ++excluded[i];
                     } else {
                       paired[i] += r * conj_phi;
                     }
                   });
  }

  ResidualReport rep;
  rep.kind = "weak_form";
  rep.times = traj.times;
  rep.residuals.resize(T);
  for (std::size_t i = 0; i < T; ++i) rep.residuals[i] = std::abs(paired[i] * cell);
  rep.excluded_modes = std::move(excluded);
  rep.details = Json{{"rule", opts.rule == QuadRule::Simpson ? "simpson" : "trapezoid"},
                     {"bump_radius", phi.radius},
                     {"bump_l1_mass", phi.l1_mass},
                     {"support_modes", support.size()},
                     {"max_residual",
                      *std::max_element(rep.residuals.begin(), rep.residuals.end())}};
  return rep;
}

ResidualReport gronwall_gap(const SolutionTrajectory& a, const SolutionTrajectory& b,
                            SymbolPtr symbol, const ResidualOptions& opts) {
  if (!a.grid || !b.grid || a.u_hat.empty() || b.u_hat.empty()) {
    throw InvalidArgument("gronwall_gap: malformed trajectory");
  }
  require_same_lattice(a.u_hat.front(), b.u_hat.front());
  if (a.times.size() != b.times.size()) {
    throw GridMismatch("gronwall_gap: trajectories hold different time lists");
  }
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, std::abs(a.times[i]))) {
      throw GridMismatch("gronwall_gap: trajectories hold different time lists");
    }
  }
  if (!symbol) throw InvalidArgument("gronwall_gap: no symbol");

  const SpectralGrid& g = *a.grid;
  const std::size_t T = a.times.size();
  const std::size_t modes = g.size();

  std::vector<double> gap(T, 0.0), envelope_exp(T, 0.0);
  std::vector<std::size_t> excluded(T, 0);
  std::mutex merge;
  parallel_for(modes, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> local_gap(T, 0.0), local_env(T, 0.0);
    std::vector<std::size_t> local_excl(T, 0);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto xi = g.point(k, Side::Frequency);
      double cum_abs = 0.0;
      double prev = 0.0;
      bool dead = false;
      for (std::size_t i = 0; i < T; ++i) {
        cum_abs += symbol_integral_abs(*symbol, prev, a.times[i], xi,
                                       opts.symbol_quad, opts.zero_mode);
        prev = a.times[i];
        local_env[i] = std::max(local_env[i], cum_abs);
        if (dead) {
          ++local_excl[i];
          continue;
        }
        const auto va = materialize_mode(a.u_hat[i], k);
        const auto vb = materialize_mode(b.u_hat[i], k);
        if (!va || !vb) {
          dead = true;
          ++local_excl[i];
          continue;
        }
        local_gap[i] = std::max(local_gap[i], std::abs(*va - *vb));
      }
    }
    std::lock_guard<std::mutex> lock(merge);
    for (std::size_t i = 0; i < T; ++i) {
      gap[i] = std::max(gap[i], local_gap[i]);
      envelope_exp[i] = std::max(envelope_exp[i], local_env[i]);
      excluded[i] += local_excl[i];
    }
  });

  std::vector<double> envelope(T);
  for (std::size_t i = 0; i < T; ++i) envelope[i] = std::exp(envelope_exp[i]);

  ResidualReport rep;
  rep.kind = "gronwall_gap";
  rep.times = a.times;
  rep.residuals = std::move(gap);
  rep.excluded_modes = std::move(excluded);
  rep.details = Json{{"envelope_exponent", envelope_exp},
                     {"envelope", envelope},
                     {"max_gap",
                      *std::max_element(rep.residuals.begin(), rep.residuals.end())}};
  return rep;
}

std::vector<double> convergence_orders(const std::vector<double>& residuals) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    orders.push_back(std::log2(residuals[i] / residuals[i + 1]));
  }
  return orders;
}

Json residual_study(const CauchyProblem& problem, const std::vector<int>& meshes,
                    const ResidualOptions& opts, const SolveOptions& solve_opts) {
  if (meshes.size() < 3) {
    throw InvalidArgument("residual_study needs at least 3 step counts");
  }
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    if (meshes[i] < 3 || (i > 0 && meshes[i] <= meshes[i - 1])) {
      throw InvalidArgument("residual_study step counts must be increasing and >= 3");
    }
  }
  if (!(problem.horizon > 0.0)) {
    throw InvalidArgument("residual_study needs a positive horizon");
  }

  const double T = problem.horizon;
  std::vector<double> dts, worsts;
  for (int m : meshes) {
    std::vector<double> times(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) times[static_cast<std::size_t>(j) - 1] = T * j / m;
    SolveOptions so = solve_opts;
    so.duhamel.mesh.clear(); // default mesh: 0 plus the output times
    const SolutionTrajectory traj = solve(problem, times, so);
    const ResidualReport rep = representation_residual(traj, problem, opts);
    dts.push_back(T / m);
    worsts.push_back(*std::max_element(rep.residuals.begin(), rep.residuals.end()));
  }

  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < dts.size(); ++i) {
    orders.push_back(std::log(worsts[i] / worsts[i + 1]) /
                     std::log(dts[i] / dts[i + 1]));
  }

  return Json{{"kind", "residual_study"},
              {"rule", opts.rule == QuadRule::Simpson ? "simpson" : "trapezoid"},
              {"steps", meshes},
              {"dt", dts},
              {"residual", worsts},
              {"order", orders}};
}

std::string residual_csv(const Json& study) {
  const auto& dt = study.at("dt");
  const auto& res = study.at("residual");
  const auto& order = study.at("order");
  std::string out = "dt,residual,order\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < dt.size(); ++i) {
    out += fmt(dt[i].get<double>());
    out += ',';
    out += fmt(res[i].get<double>());
    out += ',';
    if (i < order.size()) out += fmt(order[i].get<double>());
    out += '\n';
  }
  return out;
}

} // namespace psidyn
