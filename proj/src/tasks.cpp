#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "psidyn/config.hpp"
#include "psidyn/field_io.hpp"

namespace psidyn {

namespace {

namespace fs = std::filesystem;

CauchyProblem make_problem(const RunConfig& cfg) {
  CauchyProblem p;
  p.symbol = cfg.symbol;
  p.u0_hat = cfg.make_initial();
  p.forcing_hat = cfg.forcing;
  p.horizon = cfg.horizon > 0.0 ? cfg.horizon : 1.0;
  return p;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open for writing: " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

std::string field_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_hat_%03zu.field", i);
  return buf;
}

std::vector<std::string> task_solve(const RunConfig& cfg, const fs::path& out) {
  const CauchyProblem problem = make_problem(cfg);
  SolveOptions so;
  so.symbol_quad = cfg.quad;
  so.duhamel = cfg.duhamel;
  so.zero_mode = cfg.zero_mode;
  const SolutionTrajectory traj = solve(problem, cfg.times, so);

  std::vector<std::string> artifacts;
  Json per_time = Json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const std::string name = field_file_name(i);
    dump_field(traj.u_hat[i], (out / name).string());
    artifacts.push_back(name);
    per_time.push_back(Json{
        {"time", traj.times[i]},
        {"file", name},
        {"log_shift", traj.u_hat[i].log_shift},
        {"overflow_modes", traj.diagnostics[i].overflow_count},
        {"max_re_exponent", traj.diagnostics[i].max_re_exponent},
        {"quad_error_estimate", traj.diagnostics[i].quad_error_estimate}});
  }
  Json manifest{{"kind", "trajectory"},
                {"times", traj.times},
                {"symbol", cfg.symbol->descriptor()},
                {"quadrature", cfg.echo.at("quadrature")},
                {"duhamel", cfg.echo.at("duhamel")},
                {"per_time", per_time}};
  write_json_file(out / "trajectory.json", manifest);
  artifacts.push_back("trajectory.json");
  return artifacts;
}

std::vector<std::string> task_kernel(const RunConfig& cfg, const fs::path& out) {
  const Field k = kernel_snapshot(*cfg.symbol, cfg.kernel_s, cfg.kernel_t, cfg.grid,
                                  cfg.quad, cfg.zero_mode);
  dump_field(k, (out / "kernel.field").string());
  double mass = 0.0, linf = 0.0;
  for (const Complex& v : k.values) {
    mass += v.real();
    linf = std::max(linf, std::abs(v));
  }
  mass *= cfg.grid->cell(Side::Physical);
  Json rep{{"kind", "kernel"},
           {"s", cfg.kernel_s},
           {"t", cfg.kernel_t},
           {"file", "kernel.field"},
           {"mass", mass},
           {"max_abs", linf}};
  write_json_file(out / "kernel.json", rep);
  return {"kernel.field", "kernel.json"};
}

std::vector<std::string> task_condition(const RunConfig& cfg, const fs::path& out,
                                        bool uniqueness) {
  const CauchyProblem problem = make_problem(cfg);
  const ConditionReport rep =
      uniqueness ? check_condition_B(problem, cfg.cond_t, cfg.cond_R, cfg.check)
                 : check_condition_A(problem, cfg.cond_t, cfg.cond_R, cfg.check);
  const std::string name = uniqueness ? "cond_b.json" : "cond_a.json";
  write_json_file(out / name, rep.to_json());
  return {name};
}

std::vector<std::string> task_weighted(const RunConfig& cfg, const fs::path& out) {
  const CauchyProblem problem = make_problem(cfg);
  const ConditionReport rep =
      check_weighted(problem, cfg.weights, cfg.cond_p, cfg.cond_q, cfg.cond_t,
                     cfg.cond_R, cfg.check);
  Json j = rep.to_json();
  j["weight_floors"] =
      weight_lower_bounds(cfg.weights, cfg.grid, cfg.cond_R).to_json();
  write_json_file(out / "weighted.json", j);
  return {"weighted.json"};
}

std::vector<std::string> task_log_conditions(const RunConfig& cfg,
                                             const fs::path& out) {
  const auto log_sym = std::dynamic_pointer_cast<const LogSymbol>(cfg.symbol);
  if (!log_sym) throw InvalidArgument("log_conditions needs a log-family symbol");
  const ConditionReport rep =
      check_log_conditions(*log_sym, cfg.cond_t, cfg.cond_R, cfg.grid, cfg.check);
  write_json_file(out / "log_conditions.json", rep.to_json());
  return {"log_conditions.json"};
}

std::vector<std::string> task_second_order(const RunConfig& cfg,
                                           const fs::path& out) {
  const auto so = std::dynamic_pointer_cast<const SecondOrderSymbol>(cfg.symbol);
  if (!so) throw InvalidArgument("second_order needs a second-order symbol");
  const ConditionReport rep =
      check_second_order(*so, cfg.cond_p, cfg.cond_t, cfg.check);
  write_json_file(out / "second_order.json", rep.to_json());
  return {"second_order.json"};
}

std::vector<std::string> task_spaces(const RunConfig& cfg, const fs::path& out,
                                     bool& hard_pass) {
  Json reports = Json::array();
  for (PropId id : cfg.spaces_props) {
    const PropertyReport rep = check_proposition(id, cfg.spaces);
    if (!rep.pass) hard_pass = false;
    reports.push_back(rep.to_json());
  }
  write_json_file(out / "spaces.json", Json{{"kind", "spaces_props"},
                                            {"reports", reports}});
  return {"spaces.json"};
}

std::vector<std::string> task_residuals(const RunConfig& cfg, const fs::path& out) {
  const CauchyProblem problem = make_problem(cfg);
  ResidualOptions ro;
  ro.rule = cfg.residual_rule;
  ro.symbol_quad = cfg.quad;
  ro.zero_mode = cfg.zero_mode;
  SolveOptions so;
  so.symbol_quad = cfg.quad;
  so.duhamel = cfg.duhamel;
  so.zero_mode = cfg.zero_mode;
  const Json study = residual_study(problem, cfg.residual_meshes, ro, so);
  write_json_file(out / "residuals.json", study);
  write_text(out / "residuals.csv", residual_csv(study));
  return {"residuals.json", "residuals.csv"};
}

} // namespace

int run_tasks(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);

  Json entries = Json::array();
  bool all_ok = true;
  for (const std::string& task : cfg.tasks) {
    Json entry{{"name", task}};
    try {
      bool hard_pass = true;
      std::vector<std::string> artifacts;
      if (task == "solve") {
        artifacts = task_solve(cfg, out);
      } else if (task == "kernel") {
        artifacts = task_kernel(cfg, out);
      } else if (task == "cond_a") {
        artifacts = task_condition(cfg, out, false);
      } else if (task == "cond_b") {
        artifacts = task_condition(cfg, out, true);
      } else if (task == "weighted") {
        artifacts = task_weighted(cfg, out);
      } else if (task == "log_conditions") {
        artifacts = task_log_conditions(cfg, out);
      } else if (task == "second_order") {
        artifacts = task_second_order(cfg, out);
      } else if (task == "spaces_props") {
        artifacts = task_spaces(cfg, out, hard_pass);
      } else if (task == "residuals") {
        artifacts = task_residuals(cfg, out);
      } else {
        throw InvalidArgument("unknown task: " + task);
      }
      entry["status"] = hard_pass ? "ok" : "failed";
      if (!hard_pass) entry["error"] = "proposition check failed";
      entry["artifacts"] = artifacts;
      all_ok = all_ok && hard_pass;
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      all_ok = false;
    }
    entries.push_back(entry);
  }

  Json manifest{{"kind", "run_manifest"},
                {"status", all_ok ? "ok" : "failed"},
                {"config", cfg.echo},
                {"tasks", entries}};
  write_json_file(out / "manifest.json", manifest);
  return all_ok ? 0 : 1;
}

} // namespace psidyn
