#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "gossipsim/config.hpp"

using namespace gossipsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() /
                       ("gossipsim_cli_" + std::to_string(++counter) + ".log");
  const std::string cmd =
      std::string(GOSSIPSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
  fs::remove(log);
  return result;
}

}  // namespace

TEST_CASE("defaults per mode") {
  const auto base = config::default_config(proto::Mode::baseline);
  CHECK(base.protocol.fan_out == 3);
  CHECK(base.protocol.t_push_ms == doctest::Approx(10.0));
  CHECK(base.protocol.t_pull_ms == doctest::Approx(4000.0));
  CHECK(base.workload.blocks == 1000);
  CHECK(base.workload.block_bytes == 160000);
  CHECK(base.workload.block_interval_ms == doctest::Approx(1500.0));
  CHECK_NOTHROW(base.validate());

  const auto enh = config::default_config(proto::Mode::enhanced);
  CHECK(enh.protocol.fan_out == 4);
  CHECK(enh.protocol.ttl == 9);
  CHECK_NOTHROW(enh.validate());
}

TEST_CASE("values overlay the mode preset") {
  const auto cfg = config::parse_config(R"({
    "protocol": {"mode": "enhanced", "n": 50, "ttl": 5, "ttl_direct": 1},
    "network": {"seed": 7, "latency": {"jitter_ms": 0.1}},
    "workload": {"blocks": 10},
    "output": {"dir": "results"}
  })");
  CHECK(cfg.protocol.mode == proto::Mode::enhanced);
  CHECK(cfg.protocol.n == 50);
  CHECK(cfg.protocol.ttl == 5);
  CHECK(cfg.protocol.fan_out == 4);  // untouched preset value
  CHECK(cfg.network.seed == 7);
  CHECK(cfg.network.latency.jitter_ms == doctest::Approx(0.1));
  CHECK(cfg.network.latency.base_ms == doctest::Approx(0.5));
  CHECK(cfg.workload.blocks == 10);
  CHECK(cfg.output.dir == "results");
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(config::parse_config(R"({"protcol": {}})"), std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config(R"({"protocol": {"fanout": 3}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config(R"({"network": {"latency": {"base": 1}}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config(R"({"workload": {"blocks": 1, "bloks": 2}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config("not json"), std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config("[1,2]"), std::invalid_argument);
}

TEST_CASE("mode constraints enforced at parse time") {
  // baseline (default mode) rejects ttl
  CHECK_THROWS_AS(config::parse_config(R"({"protocol": {"ttl": 9}})"),
                  std::invalid_argument);
  // enhanced rejects a pull timer
  CHECK_THROWS_AS(
      config::parse_config(R"({"protocol": {"mode": "enhanced", "t_pull_ms": 4000}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config(R"({"protocol": {"mode": "both"}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::parse_config(R"({"network": {"drop_probability": 1.5}})"),
                  std::invalid_argument);
}

TEST_CASE("resolved config round-trips") {
  auto cfg = config::default_config(proto::Mode::enhanced);
  cfg.protocol.n = 25;
  cfg.network.seed = 123;
  cfg.workload.conflict_block_periods_ms = {500.0, 250.0};
  const std::string dumped = config::to_json(cfg);
  const auto reparsed = config::parse_config(dumped);
  CHECK(config::to_json(reparsed) == dumped);
  CHECK(reparsed.protocol.n == 25);
  CHECK(reparsed.workload.conflict_block_periods_ms == cfg.workload.conflict_block_periods_ms);
}

TEST_CASE("cli: ttl analysis and table") {
  const auto r = run_cli("ttl --n 100 --fout 4 --pe 1e-6");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("min ttl            9") != std::string::npos);

  const auto table = run_cli("ttl --fout 4 --pe 1e-6 --table 10 --table 100 --table 1000");
  CHECK(table.exit_code == 0);
  CHECK(table.output.find("\"ttl\": 9") != std::string::npos);

  CHECK(run_cli("ttl --n 100 --fout 1 --pe 1e-6").exit_code == 2);
  CHECK(run_cli("ttl --n 100 --fout 4 --pe 2.0").exit_code == 2);
  CHECK(run_cli("bogus").exit_code == 2);
}

TEST_CASE("cli: montecarlo smoke") {
  const auto r = run_cli("montecarlo --mode enhanced --n 30 --fout 4 --ttl 5 "
                         "--ttl-direct 2 --trials 50 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("informed mean") != std::string::npos);
  CHECK(run_cli("montecarlo --mode enhanced --n 30 --fout 4 --ttl 0 --trials 5")
            .exit_code == 2);
}

TEST_CASE("cli: simulate writes outputs and respects exit codes") {
  const fs::path dir = fs::temp_directory_path() / "gossipsim_sim_test";
  fs::remove_all(dir);
  const fs::path cfg_path = fs::temp_directory_path() / "gossipsim_sim_test.json";
  {
    std::ofstream out(cfg_path);
    out << R"({
      "protocol": {"mode": "enhanced", "n": 10, "fan_out": 3, "ttl": 4, "ttl_direct": 1},
      "workload": {"blocks": 5, "block_bytes": 1000, "block_interval_ms": 100.0,
                   "drain_ms": 30000.0},
      "output": {"dir": ")" << dir.string() << R"("}
    })";
  }
  const auto r = run_cli("simulate --config " + cfg_path.string() + " --seed 5");
  CAPTURE(r.output);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "latency.csv"));
  CHECK(fs::exists(dir / "bandwidth.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "resolved_config.json"));

  // the resolved config reproduces the run byte-for-byte
  const std::string first_latency = slurp(dir / "latency.csv");
  const fs::path dir2 = fs::temp_directory_path() / "gossipsim_sim_test2";
  fs::remove_all(dir2);
  const auto r2 = run_cli("simulate --config " + (dir / "resolved_config.json").string() +
                          " --out " + dir2.string());
  CHECK(r2.exit_code == 0);
  CHECK(slurp(dir2 / "latency.csv") == first_latency);

  CHECK(run_cli("simulate --config /nonexistent.json").exit_code == 2);
  fs::remove_all(dir);
  fs::remove_all(dir2);
  fs::remove(cfg_path);
}
