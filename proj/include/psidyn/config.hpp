#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "psidyn/propagator.hpp"
#include "psidyn/spaces.hpp"
#include "psidyn/verify.hpp"
#include "psidyn/wellposedness.hpp"

namespace psidyn {

// Fully validated run description. Everything here is deterministic given
// the file content; initial data and forcing are carried as builders so
// `describe` never computes a transform.
struct RunConfig {
  int spec_version = 1;

  GridPtr grid;
  SymbolPtr symbol;
  std::string symbol_family;
  ZeroModePolicy zero_mode = ZeroModePolicy::Drop;

  std::function<Field()> make_initial; // frequency-side; empty when no data given
  std::string initial_desc = "none";
  std::function<Field(double)> forcing; // empty when forcing is "none"
  std::string forcing_kind = "none";

  std::vector<double> times;
  double horizon = 0.0;

  QuadratureSpec quad;
  DuhamelSpec duhamel;

  std::vector<std::string> tasks;

  WeightSpec weights;
  Json weights_desc;

  // shared condition-check parameters
  double cond_t = 1.0;
  double cond_R = 0.0; // 0: half the grid radius
  double cond_p = 2.0;
  double cond_q = 2.0;
  CheckOptions check;

  PropParams spaces;
  std::vector<PropId> spaces_props;

  std::vector<int> residual_meshes = {16, 32, 64, 128};
  QuadRule residual_rule = QuadRule::Trapezoid;

  double kernel_s = 0.0;
  double kernel_t = 0.0;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  Json echo; // normalized config, embedded in the manifest
};

// Parse and validate a YAML run configuration. Any schema violation
// (unknown key, type mismatch, missing requirement, task/family
// inconsistency, missing referenced file) throws ConfigParse with
// file:line:column context.
RunConfig load_config(const std::string& path);

// Print the execution plan (grid, symbol, tasks, mode and node counts)
// without computing anything.
void describe_config(const RunConfig& cfg, std::ostream& out);

// Execute the configured tasks in order, writing one report per task plus
// manifest.json under cfg.output_dir. Returns 0 when every task succeeded,
// 1 otherwise; the manifest is written either way.
int run_tasks(const RunConfig& cfg);

} // namespace psidyn
