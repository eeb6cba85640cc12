#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

// Driver binary location is handed in by the test harness environment.
const char* cli_path() { return std::getenv("PSIDYN_CLI"); }

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd =
      std::string("\"") + cli_path() + "\" " + args + " > \"" + log.string() +
      "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
#ifdef _WIN32
  r.exit_code = raw;
#else
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
#endif
  r.out = slurp(log);
  return r;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kHeatConfig = R"(spec_version: 1
grid: {dim: 1, n: 64, extent: 20}
symbol:
  family: second_order
  a: [[1]]
initial: {builtin: gaussian}
times: [0.25, 0.5]
tasks: [solve, kernel, cond_a]
conditions: {t: 0.5, R: 3.0}
)";

} // namespace

TEST_CASE("driver: end-to-end run, describe, determinism, failure modes") {
  if (cli_path() == nullptr) {
    MESSAGE("PSIDYN_CLI not set; driver tests skipped");
    return;
  }

  SUBCASE("describe parses and reports the plan") {
    const fs::path dir = fresh_dir("psidyn_cli_describe");
    write_file(dir / "run.yaml", kHeatConfig);
    const auto r = run_cli("describe \"" + (dir / "run.yaml").string() + "\"", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("solve") != std::string::npos);
  }

  SUBCASE("run produces a manifest and deterministic artifacts") {
    const fs::path dir = fresh_dir("psidyn_cli_run");
    write_file(dir / "run.yaml", kHeatConfig);
    const fs::path out1 = dir / "out1";
    const fs::path out2 = dir / "out2";

    const auto r1 = run_cli("run \"" + (dir / "run.yaml").string() +
                                "\" --output-dir \"" + out1.string() + "\"",
                            dir);
    CHECK(r1.exit_code == 0);

    const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    CHECK(manifest["kind"] == "run_manifest");
    CHECK(manifest["status"] == "ok");
    CHECK(fs::exists(out1 / "trajectory.json"));
    CHECK(fs::exists(out1 / "kernel.field"));
    CHECK(fs::exists(out1 / "cond_a.json"));

    const auto r2 = run_cli("run \"" + (dir / "run.yaml").string() +
                                "\" --output-dir \"" + out2.string() + "\"",
                            dir);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(out1 / "manifest.json") == slurp(out2 / "manifest.json"));
    CHECK(slurp(out1 / "u_hat_000.field") == slurp(out2 / "u_hat_000.field"));
    CHECK(slurp(out1 / "trajectory.json") == slurp(out2 / "trajectory.json"));
  }

  SUBCASE("config errors name the offending key and exit 2") {
    const fs::path dir = fresh_dir("psidyn_cli_badkey");
    write_file(dir / "bad.yaml", R"(spec_version: 1
grid: {dim: 1, n: 64, extent: 20}
symbl:
  family: second_order
  a: [[1]]
tasks: []
)");
    const auto r = run_cli("run \"" + (dir / "bad.yaml").string() + "\"", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("symbl") != std::string::npos);
  }

  SUBCASE("task and symbol family must agree") {
    const fs::path dir = fresh_dir("psidyn_cli_family");
    write_file(dir / "bad.yaml", R"(spec_version: 1
grid: {dim: 1, n: 64, extent: 20}
symbol:
  family: second_order
  a: [[1]]
tasks: [log_conditions]
conditions: {t: 1.0, R: 2.0}
)");
    const auto r = run_cli("run \"" + (dir / "bad.yaml").string() + "\"", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("log") != std::string::npos);
  }

  SUBCASE("runtime task failure exits 1 and records a failed manifest") {
    const fs::path dir = fresh_dir("psidyn_cli_overflow");
    // backward heat on a wide band: the kernel multiplier exceeds exp(700)
    write_file(dir / "blow.yaml", R"(spec_version: 1
grid: {dim: 1, n: 64, extent: 4}
symbol:
  family: second_order
  a: [[-1]]
initial: {builtin: gaussian}
times: [2.0]
tasks: [kernel]
kernel: {s: 0.0, t: 2.0}
)");
    const fs::path out = dir / "out";
    const auto r = run_cli("run \"" + (dir / "blow.yaml").string() +
                               "\" --output-dir \"" + out.string() + "\"",
                           dir);
    CHECK(r.exit_code == 1);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["status"] == "failed");
    bool kernel_failed = false;
    for (const auto& t : manifest["tasks"]) {
      if (t["name"] == "kernel") kernel_failed = (t["status"] == "failed");
    }
    CHECK(kernel_failed);
  }

  SUBCASE("missing config file exits 2") {
    const fs::path dir = fresh_dir("psidyn_cli_missing");
    const auto r = run_cli("run \"" + (dir / "nope.yaml").string() + "\"", dir);
    CHECK(r.exit_code == 2);
  }
}
