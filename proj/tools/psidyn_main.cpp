#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "psidyn/config.hpp"
#include "psidyn/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral solver and verification suite for evolution "
               "equations with time-dependent frequency symbols"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int threads = 0;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "execute the configured tasks");
  run->add_option("config", config_path, "run configuration file")->required();
  run->add_option("--output-dir", output_dir,
                  "override the configured output directory");
  run->add_option("--threads", threads,
                  "worker thread count (default: environment or hardware)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the configured seed");

  CLI::App* describe = app.add_subcommand("describe", "print the execution plan");
  describe->add_option("config", config_path, "run configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    psidyn::RunConfig cfg = psidyn::load_config(config_path);
    if (describe->parsed()) {
      psidyn::describe_config(cfg, std::cout);
      return 0;
    }
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed_opt->count() > 0) {
      cfg.seed = seed;
      cfg.spaces.seed = seed;
      cfg.echo["seed"] = seed;
    }
    if (threads > 0) psidyn::set_thread_count(threads);
    return psidyn::run_tasks(cfg);
  } catch (const psidyn::ConfigParse& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
