#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <sys/wait.h>

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(SBFE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliRun result;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

const std::string kData = std::string(SBFE_DATA_DIR);

}  // namespace

TEST_CASE("eval runs a strategy and reports value and cost") {
  const CliRun r = run_cli("eval --formula " + kData + "/or2.dnf --strategy naive --x 10");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("\"value\": 1") != std::string::npos);
  REQUIRE(r.output.find("\"cost\": 1.0") != std::string::npos);
}

TEST_CASE("eval reproduces the protocol trace cost on the worked example") {
  const CliRun r = run_cli("eval --formula " + kData +
                           "/or2.dnf --strategy kdnf --x 01 --share off --trace");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("\"cost\": 4.0") != std::string::npos);
  REQUIRE(r.output.find("\"trace\"") != std::string::npos);
}

TEST_CASE("eval exits 2 on malformed input") {
  REQUIRE(run_cli("eval --formula " + kData + "/or2.dnf --strategy naive --x 101").exit_code == 2);
  REQUIRE(run_cli("eval --formula " + kData + "/or2.dnf --strategy naive --x 1z").exit_code == 2);
  REQUIRE(run_cli("eval --formula " + kData + "/or2.dnf --strategy naive").exit_code == 2);
  REQUIRE(run_cli("eval --formula /nonexistent.dnf --strategy naive --x 1").exit_code == 2);
}

TEST_CASE("eval exits 3 on semantic errors") {
  REQUIRE(run_cli("eval --formula " + kData + "/negated.dnf --strategy naive --x 11").exit_code == 3);
  REQUIRE(run_cli("eval --formula " + kData + "/or2.dnf --strategy nosuch --x 11").exit_code == 3);
}

TEST_CASE("sampled inputs echo their seed and reproduce") {
  const std::string args =
      "eval --formula " + kData + "/path3.dnf --strategy kterm --seed 31";
  const CliRun a = run_cli(args);
  const CliRun b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.output == b.output);
  REQUIRE(a.output.find("\"seed\": 31") != std::string::npos);
}

TEST_CASE("compare emits the expected table") {
  const std::string args = "compare --formula " + kData + "/path3.dnf";
  const CliRun r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("strategy,e_cost,ratio_vs_cert,ratio_vs_opt") != std::string::npos);
  REQUIRE(r.output.find("opt,1.750000000") != std::string::npos);
  REQUIRE(r.output.find("cert,1.500000000") != std::string::npos);
  // deterministic byte-for-byte
  REQUIRE(run_cli(args).output == r.output);

  const CliRun mc = run_cli("compare --formula " + kData + "/path3.dnf --mode mc");
  REQUIRE(mc.exit_code == 3);  // trials and seed are required in mc mode
}

TEST_CASE("gap reports closed forms and oracle values") {
  const CliRun r = run_cli("gap --n 12 --beta 0.5");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("4.93212890625") != std::string::npos);
  REQUIRE(r.output.find("e_cert_oracle") != std::string::npos);

  // n=9 rounds to term length 2, which does not divide 9
  const CliRun bad = run_cli("gap --n 9 --beta 0.5");
  REQUIRE(bad.exit_code == 3);
  REQUIRE(bad.output.find("8") != std::string::npos);
  REQUIRE(bad.output.find("12") != std::string::npos);
}

TEST_CASE("vc recovers the middle of a path") {
  const CliRun r = run_cli("vc --graph " + kData + "/path3.graph");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("\"cover\": [\n    2\n  ]") != std::string::npos);
  REQUIRE(r.output.find("\"size\": 1") != std::string::npos);
}

TEST_CASE("compare prices by monte carlo when asked") {
  const CliRun r = run_cli("compare --formula " + kData +
                           "/or2.dnf --mode mc --trials 2000 --seed 5 --strategies naive,kdnf");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("naive,") != std::string::npos);
  REQUIRE(r.output.find("opt,") != std::string::npos);
}

TEST_CASE("uniform-dp demands a unit/uniform config") {
  REQUIRE(run_cli("eval --formula " + kData + "/or2.dnf --config " + kData +
                  "/weighted2.json --strategy uniform-dp --x 11")
              .exit_code == 3);
  REQUIRE(run_cli("compare --formula " + kData + "/or2.dnf --config " + kData +
                  "/weighted2.json --strategies uniform-dp")
              .exit_code == 3);
}

TEST_CASE("eval can export the policy's decision tree") {
  const std::string tree = std::string(SBFE_CLI_PATH) + ".tree.json";
  const CliRun r = run_cli("eval --formula " + kData +
                           "/path3.dnf --strategy dp --x 000 --export-tree " + tree);
  REQUIRE(r.exit_code == 0);
  std::ifstream in(tree);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(text.find("\"test\": 2") != std::string::npos);  // shared variable at the root
  REQUIRE(text.find("\"leaf\"") != std::string::npos);

  REQUIRE(run_cli("eval --formula " + kData +
                  "/path3.dnf --strategy naive --x 000 --export-tree " + tree)
              .exit_code == 3);
}

TEST_CASE("compare emits gated per-input breakdowns") {
  const CliRun r = run_cli("compare --formula " + kData +
                           "/or2.dnf --strategies naive --format json --breakdown");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("\"breakdown\"") != std::string::npos);
  REQUIRE(r.output.find("\"x\": \"01\"") != std::string::npos);

  REQUIRE(run_cli("compare --formula " + kData + "/or2.dnf --breakdown").exit_code == 3);
}

TEST_CASE("ratio-study emits its CSV header and reproduces under a fixed seed") {
  const std::string args = "ratio-study --family kterm --count 3 --n 5 --k 2 --seed 9";
  const CliRun r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("instance_id,n,k,rho,e_cost,e_cert,e_opt,ratio,bound") !=
          std::string::npos);
  REQUIRE(run_cli(args).output == r.output);
}
