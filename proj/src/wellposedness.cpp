#include "psidyn/wellposedness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "psidyn/parallel.hpp"

namespace psidyn {

WeightSpec WeightSpec::unit() {
  WeightSpec w;
  w.W0 = [](const std::array<double, 3>&) { return 1.0; };
  w.W1 = [](const std::array<double, 3>&) { return 1.0; };
  w.W2 = [](double, const std::array<double, 3>&) { return 1.0; };
  return w;
}

Json ConditionReport::to_json() const {
  Json j;
  j["condition"] = condition;
  j["params"] = params;
  j["bound"] = bound;
  j["finite"] = finite;
  j["details"] = details;
  return j;
}

namespace {

std::vector<std::size_t> ball_modes(const SpectralGrid& g, double R) {
  if (!(R > 0.0)) throw InvalidArgument("ball radius must be positive");
  if (R > g.grid_radius() * (1.0 + 1e-12)) {
    throw RadiusExceedsGrid("ball radius " + std::to_string(R) +
                            " exceeds grid radius " +
                            std::to_string(g.grid_radius()));
  }
  std::vector<std::size_t> modes;
  const double r2 = R * R;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.abs2(k, Side::Frequency) < r2) modes.push_back(k);
  }
  return modes;
}

void require_solvable_data(const CauchyProblem& problem, const char* who) {
  if (!problem.symbol) throw InvalidArgument(std::string(who) + ": no symbol");
  if (!problem.u0_hat.grid || problem.u0_hat.side != Side::Frequency ||
      !problem.u0_hat.plain()) {
    throw InvalidArgument(std::string(who) +
                          ": initial data must be a plain frequency-side field");
  }
  require_finite(problem.u0_hat, who);
}

// |forcing| restricted to the ball at every mesh node; empty if no forcing.
std::vector<std::vector<double>> forcing_abs_matrix(
    const CauchyProblem& problem, const std::vector<double>& mesh,
    const std::vector<std::size_t>& ball) {
  std::vector<std::vector<double>> rows;
  if (!problem.forcing_hat) return rows;
  rows.reserve(mesh.size());
  for (double s : mesh) {
    Field f = problem.forcing_hat(s);
    if (f.side != Side::Frequency || !f.plain()) {
      throw InvalidArgument("forcing must produce plain frequency-side fields");
    }
    require_same_lattice(problem.u0_hat, f);
    require_finite(f, "condition forcing");
    std::vector<double> row(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i) row[i] = std::abs(f.values[ball[i]]);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Refined {
  std::vector<int> meshes;
  std::vector<double> values;
  double value = 0.0;
  bool finite = false;
};

// Evaluate at mesh resolutions base, 2*base, ..., base << refinements and
// certify: the finest value is finite, under the hard threshold, and the
// last two halvings each moved it by at most stability_rel (relative to the
// finest value).
Refined refine_certificate(const CheckOptions& opts,
                           const std::function<double(int)>& value_at_level) {
  Refined r;
  const int L = std::max(opts.refinements, 0);
  for (int l = 0; l <= L; ++l) {
    r.meshes.push_back(opts.time_steps << l);
    r.values.push_back(value_at_level(l));
  }
  r.value = r.values.back();
  bool stable = std::isfinite(r.value) && r.value < opts.finite_threshold;
  const std::size_t deltas = std::min<std::size_t>(2, r.values.size() - 1);
  for (std::size_t i = 0; i < deltas && stable; ++i) {
    const double a = r.values[r.values.size() - 1 - i];
    const double b = r.values[r.values.size() - 2 - i];
    if (!(std::abs(a - b) <= opts.stability_rel * std::abs(r.value))) stable = false;
  }
  r.finite = stable;
  return r;
}

Json refinement_json(const Refined& r) {
  return Json{{"meshes", r.meshes}, {"values", r.values}};
}

Json base_params(const CheckOptions& opts) {
  return Json{{"time_steps", opts.time_steps},
              {"refinements", opts.refinements},
              {"finite_threshold", opts.finite_threshold},
              {"stability_rel", opts.stability_rel},
              {"zero_mode",
               opts.zero_mode == ZeroModePolicy::Drop ? "drop" : "error"}};
}

std::vector<double> uniform_mesh(double t, int n) {
  std::vector<double> mesh(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) mesh[static_cast<std::size_t>(j)] = t * j / n;
  return mesh;
}

double trap_weight(int j, int n, double h) {
  return (j == 0 || j == n) ? 0.5 * h : h;
}

// L_p of mesh samples over (0, t): trapezoid in the p-th power, max at inf.
double mesh_lp(const std::vector<double>& vals, double h, double p) {
  if (std::isinf(p)) return *std::max_element(vals.begin(), vals.end());
  double acc = 0.0;
  const int n = static_cast<int>(vals.size()) - 1;
  for (int j = 0; j <= n; ++j) {
    acc += trap_weight(j, n, h) * std::pow(vals[static_cast<std::size_t>(j)], p);
  }
  return std::pow(acc, 1.0 / p);
}

} // namespace

//----------------------------------------------------------------------------
// Existence / uniqueness integrals

namespace {

double condition_bound(const CauchyProblem& problem, double t, double R,
                       const CheckOptions& opts, int level, bool uniqueness) {
  const SpectralGrid& g = *problem.u0_hat.grid;
  const int N = opts.time_steps << level;
  const std::vector<double> mesh = uniform_mesh(t, N);
  const double h = t / N;
  const std::vector<std::size_t> ball = ball_modes(g, R);
  const auto fabs = forcing_abs_matrix(problem, mesh, ball);
  const Symbol& sym = *problem.symbol;
  const QuadratureSpec& quad = opts.quad;
  const ZeroModePolicy policy = opts.zero_mode;

  std::vector<double> per_mode(ball.size(), 0.0);
  parallel_for(ball.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> cum(static_cast<std::size_t>(N) + 1);
    std::vector<double> apsi;
    if (uniqueness) apsi.resize(static_cast<std::size_t>(N) + 1);
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t k = ball[i];
      const auto xi = g.point(k, Side::Frequency);
      cum[0] = 0.0;
      for (int l = 1; l <= N; ++l) {
        cum[static_cast<std::size_t>(l)] =
            cum[static_cast<std::size_t>(l) - 1] +
            symbol_integral(sym, mesh[static_cast<std::size_t>(l) - 1],
                            mesh[static_cast<std::size_t>(l)], xi, quad, policy)
                .real();
      }
      const double u0a = std::abs(problem.u0_hat.values[k]);
      double total = 0.0;
      if (!uniqueness) {
        total = std::exp(cum[static_cast<std::size_t>(N)]) * u0a;
        if (!fabs.empty()) {
          double duh = 0.0;
          for (int j = 0; j <= N; ++j) {
            duh += trap_weight(j, N, h) *
                   std::exp(cum[static_cast<std::size_t>(N)] -
                            cum[static_cast<std::size_t>(j)]) *
                   fabs[static_cast<std::size_t>(j)][i];
          }
          total += duh;
        }
      } else {
        for (int j = 0; j <= N; ++j) {
          apsi[static_cast<std::size_t>(j)] =
              std::abs(symbol_value(sym, mesh[static_cast<std::size_t>(j)], xi,
                                    policy));
        }
        double outer_data = 0.0;
        double outer_forcing = 0.0;
        for (int j = 0; j <= N; ++j) {
          const double wj = trap_weight(j, N, h);
          outer_data += wj * apsi[static_cast<std::size_t>(j)] *
                        std::exp(cum[static_cast<std::size_t>(j)]);
          if (!fabs.empty() && j > 0) {
            double inner = 0.0;
            for (int l = 0; l <= j; ++l) {
              inner += trap_weight(l, j, h) *
                       std::exp(cum[static_cast<std::size_t>(j)] -
                                cum[static_cast<std::size_t>(l)]) *
                       fabs[static_cast<std::size_t>(l)][i];
            }
            outer_forcing += wj * apsi[static_cast<std::size_t>(j)] * inner;
          }
        }
        total = outer_data * u0a + outer_forcing;
      }
      per_mode[i] = total;
    }
  });

  double sum = 0.0;
  for (double v : per_mode) sum += v;
  return sum * g.cell(Side::Frequency);
}

ConditionReport condition_report(const CauchyProblem& problem, double t, double R,
                                 const CheckOptions& opts, bool uniqueness) {
  require_solvable_data(problem, uniqueness ? "check_condition_B" : "check_condition_A");
  if (!(t > 0.0)) throw InvalidArgument("condition time must be positive");
  opts.quad.validate();

  Refined r = refine_certificate(opts, [&](int level) {
    return condition_bound(problem, t, R, opts, level, uniqueness);
  });

  ConditionReport rep;
  rep.condition = uniqueness ? "uniqueness" : "existence";
  rep.params = base_params(opts);
  rep.params["t"] = t;
  rep.params["R"] = R;
  rep.bound = r.value;
  rep.finite = r.finite;
  rep.details = Json{{"refinement", refinement_json(r)},
                     {"mode_count", ball_modes(*problem.u0_hat.grid, R).size()},
                     {"has_forcing", static_cast<bool>(problem.forcing_hat)}};
  return rep;
}

} // namespace

ConditionReport check_condition_A(const CauchyProblem& problem, double t, double R,
                                  const CheckOptions& opts) {
  return condition_report(problem, t, R, opts, false);
}

ConditionReport check_condition_B(const CauchyProblem& problem, double t, double R,
                                  const CheckOptions& opts) {
  return condition_report(problem, t, R, opts, true);
}

//----------------------------------------------------------------------------
// Weighted solvability estimate

namespace {

struct WeightedParts {
  double norm0 = 0.0;
  double norm1 = 0.0;
  double data_f = 0.0;
};

WeightedParts weighted_parts(const CauchyProblem& problem, const WeightSpec& weights,
                             double p, double q, double t, double R,
                             const CheckOptions& opts, int level) {
  const SpectralGrid& g = *problem.u0_hat.grid;
  const int N = opts.time_steps << level;
  const std::vector<double> mesh = uniform_mesh(t, N);
  const double h = t / N;
  const std::vector<std::size_t> ball = ball_modes(g, R);
  const auto fabs = forcing_abs_matrix(problem, mesh, ball);
  const Symbol& sym = *problem.symbol;
  const ZeroModePolicy policy = opts.zero_mode;
  const std::size_t nodes = mesh.size();

  std::vector<double> W0v(ball.size()), W1v(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const auto xi = g.point(ball[i], Side::Frequency);
    W0v[i] = weights.W0(xi);
    W1v[i] = weights.W1(xi);
    if (!(W0v[i] > 0.0) || !(W1v[i] > 0.0)) {
      throw WeightNotPositive("weight W0/W1 non-positive at |xi| = " +
                              std::to_string(std::sqrt(g.abs2(ball[i], Side::Frequency))));
    }
  }

  // envelope values per (node, mode), reduced to per-node maxima afterwards
  std::vector<double> env0(nodes * ball.size()), env1(nodes * ball.size());
  parallel_for(ball.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> cum_re(nodes), cum_abs_re(nodes);
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t k = ball[i];
      const auto xi = g.point(k, Side::Frequency);
      cum_re[0] = 0.0;
      cum_abs_re[0] = 0.0;
      for (std::size_t l = 1; l < nodes; ++l) {
        cum_re[l] = cum_re[l - 1] +
                    symbol_integral(sym, mesh[l - 1], mesh[l], xi, opts.quad, policy)
                        .real();
        cum_abs_re[l] =
            cum_abs_re[l - 1] +
            symbol_integral_abs_re(sym, mesh[l - 1], mesh[l], xi, opts.quad, policy);
      }
      for (std::size_t j = 0; j < nodes; ++j) {
        const double apsi =
            std::abs(symbol_value(sym, mesh[j], xi, policy));
        env0[j * ball.size() + i] = (1.0 + apsi) / W0v[i] * std::exp(cum_re[j]);
        env1[j * ball.size() + i] = (1.0 + apsi) / W1v[i] * std::exp(cum_abs_re[j]);
      }
    }
  });

  std::vector<double> g0(nodes, 0.0), g1(nodes, 0.0);
  for (std::size_t j = 0; j < nodes; ++j) {
    for (std::size_t i = 0; i < ball.size(); ++i) {
      g0[j] = std::max(g0[j], env0[j * ball.size() + i]);
      g1[j] = std::max(g1[j], env1[j * ball.size() + i]);
    }
  }

  WeightedParts parts;
  parts.norm0 = mesh_lp(g0, h, p);
  parts.norm1 = mesh_lp(g1, h, p);

  if (!fabs.empty()) {
    const double cell = g.cell(Side::Frequency);
    std::vector<double> hq(nodes, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
      double acc = 0.0;
      double m = 0.0;
      for (std::size_t i = 0; i < ball.size(); ++i) {
        const auto xi = g.point(ball[i], Side::Frequency);
        const double w2 = weights.W2 ? weights.W2(mesh[j], xi) : 1.0;
        if (!(w2 > 0.0)) {
          throw WeightNotPositive("weight W2 non-positive at sampled node");
        }
        if (w2 < W1v[i] * (1.0 - 1e-12)) {
          throw InvalidArgument("weighted check needs W2 >= W1 on the sampled set");
        }
        const double v = fabs[j][i] * w2;
        if (std::isinf(q)) {
          m = std::max(m, v);
        } else {
          acc += std::pow(v, q) * cell;
        }
      }
      hq[j] = std::isinf(q) ? m : std::pow(acc, 1.0 / q);
    }
    parts.data_f = mesh_lp(hq, h, p);
  }
  return parts;
}

} // namespace

ConditionReport check_weighted(const CauchyProblem& problem,
                               const WeightSpec& weights, double p, double q,
                               double t, double R, const CheckOptions& opts) {
  require_solvable_data(problem, "check_weighted");
  if (!weights.W0 || !weights.W1) {
    throw InvalidArgument("check_weighted needs W0 and W1");
  }
  if (!(t > 0.0)) throw InvalidArgument("condition time must be positive");
  if (!(p >= 1.0) || !(q >= 1.0)) {
    throw InvalidArgument("weighted check needs p, q >= 1");
  }
  opts.quad.validate();

  const SpectralGrid& g = *problem.u0_hat.grid;
  const std::vector<std::size_t> ball = ball_modes(g, R);
  const double cell = g.cell(Side::Frequency);

  // weighted initial-data norm and weight floors; mesh-independent
  double data_u0 = 0.0;
  double kappa0 = std::numeric_limits<double>::infinity();
  double kappa1 = std::numeric_limits<double>::infinity();
  {
    double acc = 0.0, m = 0.0;
    for (std::size_t k : ball) {
      const auto xi = g.point(k, Side::Frequency);
      const double w0 = weights.W0(xi), w1 = weights.W1(xi);
      if (!(w0 > 0.0) || !(w1 > 0.0)) {
        throw WeightNotPositive("weight W0/W1 non-positive on the ball");
      }
      kappa0 = std::min(kappa0, w0);
      kappa1 = std::min(kappa1, w1);
      const double v = std::abs(problem.u0_hat.values[k]) * w0;
      if (std::isinf(q)) {
        m = std::max(m, v);
      } else {
        acc += std::pow(v, q) * cell;
      }
    }
    data_u0 = std::isinf(q) ? m : std::pow(acc, 1.0 / q);
  }

  WeightedParts finest;
  Refined r = refine_certificate(opts, [&](int level) {
    finest = weighted_parts(problem, weights, p, q, t, R, opts, level);
    return finest.norm0 + finest.norm1;
  });

  const double t_factor =
      std::isinf(p) ? t : (p == 1.0 ? 1.0 : std::pow(t, 1.0 - 1.0 / p));
  const double apriori = finest.norm0 * data_u0 + t_factor * finest.norm1 * finest.data_f;

  ConditionReport rep;
  rep.condition = "weighted";
  rep.params = base_params(opts);
  rep.params["t"] = t;
  rep.params["R"] = R;
  rep.params["p"] = p;
  rep.params["q"] = q;
  rep.bound = r.value;
  rep.finite = r.finite;
  rep.details = Json{{"norm0", finest.norm0},
                     {"norm1", finest.norm1},
                     {"data_norm_initial", data_u0},
                     {"data_norm_forcing", finest.data_f},
                     {"apriori_bound", apriori},
                     {"kappa0", kappa0},
                     {"kappa1", kappa1},
                     {"conjugate_time_factor", t_factor},
                     {"refinement", refinement_json(r)},
                     {"mode_count", ball.size()}};
  return rep;
}

//----------------------------------------------------------------------------
// Logarithmic-family conditions

namespace {

struct LogParts {
  double log0 = 0.0;
  double log1 = 0.0;
  double log2 = 0.0;
  std::size_t dropped = 0;
};

LogParts log_parts(const LogSymbol& sym, double t, double R, const SpectralGrid& g,
                   const CheckOptions& opts, int level) {
  const int N = opts.time_steps << level;
  const std::vector<double> mesh = uniform_mesh(t, N);
  const double h = t / N;
  const std::vector<std::size_t> ball = ball_modes(g, R);
  const Coefficient& beta = sym.beta();
  const InnerSymbol& inner = sym.inner();
  const bool exact_mean = inner.time_constant && beta.exact();

  QuadratureSpec quad = opts.quad;
  quad.panels = std::max(1, quad.panels << level);

  LogParts parts;

  // coefficient L1 norm
  if (beta.exact()) {
    std::vector<double> splits;
    beta.split_points(0.0, t, splits);
    std::sort(splits.begin(), splits.end());
    double lo = 0.0, acc = 0.0;
    for (double s : splits) {
      acc += std::abs(beta.at(0.5 * (lo + s))) * (s - lo);
      lo = s;
    }
    acc += std::abs(beta.at(0.5 * (lo + t))) * (t - lo);
    parts.log0 = acc;
  } else {
    parts.log0 = integrate_real([&](double r) { return std::abs(beta.at(r)); },
                                0.0, t, quad);
  }

  std::vector<double> beta_re(mesh.size()), beta_abs(mesh.size());
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Complex bv = beta.at(mesh[j]);
    beta_re[j] = bv.real();
    beta_abs[j] = std::abs(bv);
  }

  std::vector<double> mode_log1(ball.size(), 0.0), mode_log2(ball.size(), 0.0);
  std::vector<std::uint8_t> mode_dropped(ball.size(), 0);

  parallel_for(ball.size(), [&](std::size_t bi, std::size_t ei) {
    std::vector<double> absw(mesh.size());
    for (std::size_t i = bi; i < ei; ++i) {
      const auto xi = g.point(ball[i], Side::Frequency);

      bool dead = false;
      if (inner.time_constant) {
        const Complex w = inner.eval(0.0, xi);
        if (w.real() == 0.0 && w.imag() == 0.0) dead = true;
        std::fill(absw.begin(), absw.end(), std::abs(w));
      } else {
        for (std::size_t j = 0; j < mesh.size() && !dead; ++j) {
          const Complex w = inner.eval(mesh[j], xi);
          if (w.real() == 0.0 && w.imag() == 0.0) dead = true;
          absw[j] = std::abs(w);
        }
      }
      if (dead) {
        if (opts.zero_mode == ZeroModePolicy::Error) {
          throw ZeroArgument("logarithmic condition check hit a vanishing inner symbol");
        }
        mode_dropped[i] = 1;
        continue;
      }

      // (rho - s)^{-1} int_s^rho |inner|^{(rho-s) Re beta(r)} dr on mesh
      // nodes a <= b.
      auto mean = [&](std::size_t a, std::size_t b) -> double {
        if (a == b) return 1.0;
        const double len = mesh[b] - mesh[a];
        if (exact_mean) {
          std::vector<double> splits;
          beta.split_points(mesh[a], mesh[b], splits);
          std::sort(splits.begin(), splits.end());
          double lo = mesh[a], acc = 0.0;
          const double w0 = absw[0];
          for (double sp : splits) {
            acc += std::pow(w0, len * beta.at(0.5 * (lo + sp)).real()) * (sp - lo);
            lo = sp;
          }
          acc += std::pow(w0, len * beta.at(0.5 * (lo + mesh[b])).real()) *
                 (mesh[b] - lo);
          return acc / len;
        }
        const double got = integrate_real(
            [&](double r) {
              const Complex w = inner.eval(r, xi);
              return std::pow(std::abs(w), len * beta.at(r).real());
            },
            mesh[a], mesh[b], quad);
        return got / len;
      };

      double l1 = 0.0, l2 = 0.0;
      for (std::size_t a = 0; a + 1 < mesh.size(); ++a) {
        l1 = std::max(l1, mean(a, mesh.size() - 1));

        // trapezoid over rho in [s_a, t] of
        // |beta(rho)| (1 + |log|inner||) mean(s_a, rho)
        const std::size_t last = mesh.size() - 1;
        double acc = 0.0;
        for (std::size_t bnode = a; bnode <= last; ++bnode) {
          const double wq = (bnode == a || bnode == last) ? 0.5 * h : h;
          const double integrand =
              beta_abs[bnode] * (1.0 + std::abs(std::log(absw[bnode]))) *
              mean(a, bnode);
          acc += wq * integrand;
        }
        l2 = std::max(l2, acc);
      }
      mode_log1[i] = l1;
      mode_log2[i] = l2;
    }
  });

  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (mode_dropped[i]) {
      ++parts.dropped;
      continue;
    }
    parts.log1 = std::max(parts.log1, mode_log1[i]);
    parts.log2 = std::max(parts.log2, mode_log2[i]);
  }
  return parts;
}

} // namespace

ConditionReport check_log_conditions(const LogSymbol& sym, double t, double R,
                                     GridPtr grid, const CheckOptions& opts) {
  if (!grid) throw InvalidArgument("check_log_conditions: no grid");
  if (!(t > 0.0)) throw InvalidArgument("condition time must be positive");
  opts.quad.validate();

  // one sweep per level feeds all three certificates
  std::vector<LogParts> per_level;
  per_level.reserve(static_cast<std::size_t>(std::max(opts.refinements, 0)) + 1);
  auto at_level = [&](int level) -> const LogParts& {
    while (static_cast<int>(per_level.size()) <= level) {
      per_level.push_back(
          log_parts(sym, t, R, *grid, opts, static_cast<int>(per_level.size())));
    }
    return per_level[static_cast<std::size_t>(level)];
  };
  Refined r0 = refine_certificate(opts, [&](int level) { return at_level(level).log0; });
  Refined r1 = refine_certificate(opts, [&](int level) { return at_level(level).log1; });
  Refined r2 = refine_certificate(opts, [&](int level) { return at_level(level).log2; });
  const LogParts& finest = per_level.back();

  ConditionReport rep;
  rep.condition = "log";
  rep.params = base_params(opts);
  rep.params["t"] = t;
  rep.params["R"] = R;
  rep.bound = std::max({r0.value, r1.value, r2.value});
  rep.finite = r0.finite && r1.finite && r2.finite;
  rep.details =
      Json{{"coefficient_l1",
            Json{{"bound", r0.value}, {"finite", r0.finite},
                 {"refinement", refinement_json(r0)}}},
           {"power_mean_sup",
            Json{{"bound", r1.value}, {"finite", r1.finite},
                 {"refinement", refinement_json(r1)}}},
           {"nested_power_mean_sup",
            Json{{"bound", r2.value}, {"finite", r2.finite},
                 {"refinement", refinement_json(r2)}}},
           {"dropped_modes", finest.dropped},
           {"mode_count", ball_modes(*grid, R).size()}};
  return rep;
}

//----------------------------------------------------------------------------
// Second-order coefficient integrability

namespace {

double coefficient_lp(const Coefficient& c, double p, double t,
                      const CheckOptions& opts, int level) {
  if (c.exact()) {
    std::vector<double> splits;
    c.split_points(0.0, t, splits);
    std::sort(splits.begin(), splits.end());
    double lo = 0.0;
    if (std::isinf(p)) {
      double m = 0.0;
      for (double s : splits) {
        m = std::max(m, std::abs(c.at(0.5 * (lo + s))));
        lo = s;
      }
      return std::max(m, std::abs(c.at(0.5 * (lo + t))));
    }
    double acc = 0.0;
    for (double s : splits) {
      acc += std::pow(std::abs(c.at(0.5 * (lo + s))), p) * (s - lo);
      lo = s;
    }
    acc += std::pow(std::abs(c.at(0.5 * (lo + t))), p) * (t - lo);
    return std::pow(acc, 1.0 / p);
  }

  const int N = opts.time_steps << level;
  if (std::isinf(p)) {
    double m = 0.0;
    for (int j = 0; j <= N; ++j) m = std::max(m, std::abs(c.at(t * j / N)));
    return m;
  }
  QuadratureSpec quad = opts.quad;
  quad.panels = N;
  return std::pow(
      integrate_real([&](double r) { return std::pow(std::abs(c.at(r)), p); },
                     0.0, t, quad),
      1.0 / p);
}

} // namespace

ConditionReport check_second_order(const SecondOrderSymbol& sym, double p,
                                   double t, const CheckOptions& opts) {
  if (!(t > 0.0)) throw InvalidArgument("condition time must be positive");
  if (!(p >= 1.0)) throw InvalidArgument("coefficient norm needs p >= 1");
  opts.quad.validate();

  const int d = sym.dim();
  Json per_coefficient;
  Refined r = refine_certificate(opts, [&](int level) {
    double total = 0.0;
    per_coefficient = Json::object();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const double v = coefficient_lp(sym.a(i, j), p, t, opts, level);
        per_coefficient["a_" + std::to_string(i) + std::to_string(j)] = v;
        total += v;
      }
    }
    for (int j = 0; j < d; ++j) {
      const double v = coefficient_lp(sym.b(j), p, t, opts, level);
      per_coefficient["b_" + std::to_string(j)] = v;
      total += v;
    }
    const double vc = coefficient_lp(sym.c(), p, t, opts, level);
    per_coefficient["c"] = vc;
    return total + vc;
  });

  ConditionReport rep;
  rep.condition = "second_order_coefficients";
  rep.params = base_params(opts);
  rep.params["t"] = t;
  rep.params["p"] = p;
  rep.bound = r.value;
  rep.finite = r.finite;
  rep.details = Json{{"per_coefficient", per_coefficient},
                     {"refinement", refinement_json(r)}};
  return rep;
}

//----------------------------------------------------------------------------
// Weight floors

ConditionReport weight_lower_bounds(const WeightSpec& weights, GridPtr grid,
                                    double R) {
  if (!grid) throw InvalidArgument("weight_lower_bounds: no grid");
  if (!weights.W0 || !weights.W1) {
    throw InvalidArgument("weight_lower_bounds needs W0 and W1");
  }
  const std::vector<std::size_t> ball = ball_modes(*grid, R);
  double kappa0 = std::numeric_limits<double>::infinity();
  double kappa1 = std::numeric_limits<double>::infinity();
  for (std::size_t k : ball) {
    const auto xi = grid->point(k, Side::Frequency);
    kappa0 = std::min(kappa0, weights.W0(xi));
    kappa1 = std::min(kappa1, weights.W1(xi));
  }

  ConditionReport rep;
  rep.condition = "weight_lower_bounds";
  rep.params = Json{{"R", R},
                    {"grid", Json{{"dim", grid->dim()},
                                  {"n", grid->n()},
                                  {"extent", grid->extent()}}}};
  rep.bound = std::min(kappa0, kappa1);
  rep.finite = kappa0 > 0.0 && kappa1 > 0.0 && std::isfinite(rep.bound);
  rep.details = Json{{"kappa0", kappa0},
                     {"kappa1", kappa1},
                     {"mode_count", ball.size()}};
  return rep;
}

} // namespace psidyn
