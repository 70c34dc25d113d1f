#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(PURCELL_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 512> buf;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const std::string kConfig = std::string(PURCELL_SOURCE_DIR) + "/configs/q6_device.json";

} // namespace

TEST_CASE("help lists the subcommands") {
  const auto r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("filter-tune") != std::string::npos);
  CHECK(r.output.find("reset") != std::string::npos);
  CHECK(r.output.find("optimize") != std::string::npos);
}

TEST_CASE("filter-tune writes the passband range and a manifest") {
  const auto r = run("--config " + kConfig + " --out /tmp/purcell_cli_tune filter-tune");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("7.04") != std::string::npos);
  const auto csv = slurp("/tmp/purcell_cli_tune/filter_tune.csv");
  CHECK(csv.find("flux_ratio,frequency") != std::string::npos);
  const auto manifest = slurp("/tmp/purcell_cli_tune/manifest.json");
  CHECK(manifest.find("filter-tune") != std::string::npos);
  CHECK(manifest.find("tool_version") != std::string::npos);
}

TEST_CASE("missing config exits with the config code") {
  const auto r = run("--config /nonexistent.json filter-tune");
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown scenario exits with the config code and lists names") {
  const auto r = run("--out /tmp/purcell_cli_x reset --scenario banana");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("paper-square") != std::string::npos);
  CHECK(r.output.find("model-adiabatic") != std::string::npos);
}

TEST_CASE("reset assertion pass and fail paths") {
  const auto ok = run("--out /tmp/purcell_cli_r1 reset --scenario paper-square "
                      "--assert residual<0.012");
  CHECK(ok.exit_code == 0);
  const auto too_strict = run("--out /tmp/purcell_cli_r2 reset --scenario paper-square "
                              "--assert residual<1e-9");
  CHECK(too_strict.exit_code == 4);
}

TEST_CASE("identical invocations produce byte-identical csv artifacts") {
  const auto a = run("--seed 7 --out /tmp/purcell_cli_d1 dephasing-scan --points 101");
  const auto b = run("--seed 7 --out /tmp/purcell_cli_d2 dephasing-scan --points 101");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp("/tmp/purcell_cli_d1/dephasing.csv") ==
        slurp("/tmp/purcell_cli_d2/dephasing.csv"));
  // the dephasing profile carries the two matching-point maxima
  CHECK(a.output.find("local maxima in Gamma_phi(Delta): 2") != std::string::npos);
}

TEST_CASE("optimizer runs deterministically from the seed") {
  const auto a = run("--seed 42 --out /tmp/purcell_cli_o1 optimize --trials 30");
  const auto b = run("--seed 42 --out /tmp/purcell_cli_o2 optimize --trials 30");
  CHECK(a.exit_code == 0);
  CHECK(slurp("/tmp/purcell_cli_o1/history.csv") ==
        slurp("/tmp/purcell_cli_o2/history.csv"));
}

TEST_CASE("calc subcommands emit json") {
  const auto r = run("calc squid-inductance --flux 0");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("8.2276") != std::string::npos);
  const auto d = run("calc dispersive-shifts");
  CHECK(d.output.find("two_chi_prime") != std::string::npos);
}
