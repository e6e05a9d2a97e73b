// End-to-end checks of the command-line tool; the binary path arrives through
// the ADMMTRACK_BIN environment variable set by CTest.

#include <catch2/catch.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "admmtrack/config.hpp"

using namespace admmtrack;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

const char* binary() { return std::getenv("ADMMTRACK_BIN"); }

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "out.log";
  std::ostringstream cmd;
  cmd << '"' << binary() << "\" " << args << " > \"" << log.string() << "\" 2>&1";
  const int raw = std::system(cmd.str().c_str());
  CliResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  return res;
}

fs::path make_scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("admmtrack_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const SimConfig& cfg) {
  const fs::path p = dir / "config.txt";
  std::ofstream(p) << emit_config(cfg);
  return p;
}

SimConfig quick_cfg() {
  SimConfig cfg;
  cfg.n_nodes = 5;
  cfg.edge_prob = 0.7;
  cfg.epsilon_ar = 0.05;
  cfg.rho = 2.0;
  cfg.num_tracks = 4;
  cfg.track_len = 12;
  cfg.warm_start_eps = 1e-3;
  cfg.seed = 3;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double field_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("graph-info on K2 prints the forced constants") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("graphinfo");
  SimConfig cfg = quick_cfg();
  cfg.n_nodes = 2;
  cfg.edge_prob = 1.0;
  const fs::path cpath = write_config(scratch, cfg);
  const CliResult res = run_cli("graph-info --config \"" + cpath.string() +
                                    "\" --out-dir \"" + scratch.string() + "\"",
                                scratch);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("m_arcs=2") != std::string::npos);
  REQUIRE(field_value(res.output, "gamma_L") == Approx(2.0).margin(1e-9));
  REQUIRE(field_value(res.output, "Gamma_L") == Approx(2.0).margin(1e-9));
  REQUIRE(slurp(scratch / "graph.txt") == "2 1\n0 1\n");
}

TEST_CASE("verify-lemma1 exits cleanly on a violation-free sweep") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("verify");
  const fs::path cpath = write_config(scratch, quick_cfg());
  const CliResult res = run_cli("verify-lemma1 --config \"" + cpath.string() +
                                    "\" --out-dir \"" + scratch.string() + "\"",
                                scratch);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.output.find("violations=0") != std::string::npos);
  REQUIRE(fs::exists(scratch / "lemma1.csv"));
}

TEST_CASE("configuration problems exit with code 1") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("badcfg");
  std::ofstream(scratch / "bad.txt") << "rho = -2\n";
  const CliResult res =
      run_cli("simulate --config \"" + (scratch / "bad.txt").string() + "\"", scratch);
  REQUIRE(res.exit_code == 1);
  REQUIRE(res.output.find("rho") != std::string::npos);

  const CliResult missing = run_cli("simulate --config /nonexistent/x.txt", scratch);
  REQUIRE(missing.exit_code == 1);
}

TEST_CASE("numerical failures exit with code 2") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("numfail");

  SECTION("warm start starved of iterations") {
    SimConfig cfg = quick_cfg();
    cfg.warm_start_eps = 1e-10;
    cfg.warm_start_max_iters = 3;
    const fs::path cpath = write_config(scratch, cfg);
    const CliResult res = run_cli("simulate --config \"" + cpath.string() +
                                      "\" --out-dir \"" + scratch.string() + "\"",
                                  scratch);
    REQUIRE(res.exit_code == 2);
    REQUIRE(res.output.find("warm_start") != std::string::npos);
  }

  SECTION("decay fit on a curvature-free process") {
    SimConfig cfg = quick_cfg();
    cfg.rows_per_node = 1;
    cfg.dim_p = 2;
    const fs::path cpath = write_config(scratch, cfg);
    const CliResult res = run_cli("decay --config \"" + cpath.string() +
                                      "\" --out-dir \"" + scratch.string() + "\"",
                                  scratch);
    REQUIRE(res.exit_code == 2);
    REQUIRE(res.output.find("degenerate") != std::string::npos);
  }
}

TEST_CASE("--seed overrides the configured seed") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("seed");
  SimConfig cfg = quick_cfg();
  const fs::path cpath = write_config(scratch, cfg);
  // run A: seed from flag; run B: same seed in the file
  const CliResult a = run_cli("simulate --config \"" + cpath.string() +
                                  "\" --seed 17 --out-dir \"" +
                                  (scratch / "a").string() + "\"",
                              scratch);
  cfg.seed = 17;
  const fs::path cpath2 = write_config(scratch, cfg);
  const CliResult b = run_cli("simulate --config \"" + cpath2.string() +
                                  "\" --out-dir \"" + (scratch / "b").string() + "\"",
                              scratch);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  REQUIRE(slurp(scratch / "a" / "curves.csv") == slurp(scratch / "b" / "curves.csv"));
  REQUIRE(slurp(scratch / "a" / "moments.csv") == slurp(scratch / "b" / "moments.csv"));
}

TEST_CASE("--trace writes a per-round trace of track 0") {
  REQUIRE(binary() != nullptr);
  const fs::path scratch = make_scratch("trace");
  SimConfig cfg = quick_cfg();
  cfg.num_tracks = 2;
  cfg.track_len = 5;
  const fs::path cpath = write_config(scratch, cfg);
  const CliResult res = run_cli("simulate --config \"" + cpath.string() +
                                    "\" --out-dir \"" + scratch.string() +
                                    "\" --trace",
                                scratch);
  REQUIRE(res.exit_code == 0);
  const std::string trace = slurp(scratch / "trace.csv");
  REQUIRE(trace.rfind("k,node,x0,x1,x2", 0) == 0);
  // rounds 0..5, one row per node per round
  long rows = 0;
  for (char c : trace)
    if (c == '\n') ++rows;
  REQUIRE(rows == 1 + 6 * cfg.n_nodes);
}
