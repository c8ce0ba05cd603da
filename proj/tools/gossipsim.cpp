// Experiment runner: analysis, connectivity trials, timed dissemination and
// the conflict grid behind one binary.
//
// Exit codes: 0 success, 2 invalid parameters/config, 3 delivery failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gossipsim/analysis.hpp"
#include "gossipsim/config.hpp"
#include "gossipsim/experiment.hpp"
#include "gossipsim/metrics.hpp"
#include "gossipsim/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace gossipsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDelivery = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path prepare_out_dir(const config::ExperimentConfig& cfg) {
  fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  write_file(dir / "resolved_config.json", config::to_json(cfg) + "\n");
  return dir;
}

config::ExperimentConfig load_effective_config(const std::string& config_path,
                                               const std::string& mode_flag,
                                               std::uint64_t seed_flag, bool seed_set,
                                               const std::string& out_flag) {
  config::ExperimentConfig cfg =
      config_path.empty() ? config::default_config(proto::Mode::baseline)
                          : config::load_config(config_path);
  // Flags override file values. --mode swaps in that mode's protocol preset
  // (network size is kept); use the config file for finer protocol control.
  if (!mode_flag.empty()) {
    const int n = cfg.protocol.n;
    cfg.protocol = proto::default_protocol_config(proto::mode_from_string(mode_flag));
    cfg.protocol.n = n;
  }
  if (seed_set) cfg.network.seed = seed_flag;
  if (!out_flag.empty()) cfg.output.dir = out_flag;
  cfg.validate();
  return cfg;
}

int cmd_ttl(int n, int fan_out, double pe, const std::vector<int>& table_ns,
            const std::string& out_path) {
  if (table_ns.empty()) {
    const auto ttl = analysis::min_ttl(n, fan_out, pe);
    if (!ttl) {
      std::cerr << "no ttl <= 1000 reaches p_e <= " << pe << "\n";
      return kExitConfig;
    }
    analysis::PushParams params{n, fan_out, *ttl};
    const auto report = analysis::analyze(params);
    std::printf("n=%d fan_out=%d p_e_target=%g\n", n, fan_out, pe);
    std::printf("gamma              %.6f\n", report.gamma);
    std::printf("psi trajectory    ");
    for (double v : report.psi_trajectory) std::printf(" %.3f", v);
    std::printf("\n");
    std::printf("expected digests   %.3f\n", report.expected_digests);
    std::printf("p_e bound          %.6e\n", report.p_e_bound);
    std::printf("min ttl            %d\n", *ttl);
    return kExitOk;
  }

  std::vector<std::tuple<int, double, int>> specs;
  for (int table_n : table_ns) specs.emplace_back(table_n, pe, fan_out);
  const auto table = analysis::TtlTable::build(specs);
  ordered_json doc = ordered_json::array();
  for (const auto& entry : table.entries()) {
    doc.push_back({{"n", entry.n},
                   {"f_out", entry.fan_out},
                   {"p_e_target", entry.p_e_target},
                   {"ttl", entry.ttl}});
  }
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_montecarlo(const std::string& mode, std::uint64_t trials, int n, int fan_out,
                   int ttl, int ttl_direct, int fan_out_leader, std::uint64_t seed) {
  proto::ProtocolConfig cfg = proto::default_protocol_config(proto::mode_from_string(mode));
  cfg.n = n;
  cfg.fan_out = fan_out;
  if (cfg.mode == proto::Mode::enhanced) {
    if (ttl >= 0) cfg.ttl = ttl;
    if (ttl_direct >= 0) cfg.ttl_direct = ttl_direct;
    if (fan_out_leader > 0) cfg.fan_out_leader = fan_out_leader;
  }
  const auto stats = montecarlo::run_trials(cfg, trials, seed);
  std::printf("mode=%s n=%d fan_out=%d trials=%llu seed=%llu\n", mode.c_str(), cfg.n,
              cfg.fan_out, static_cast<unsigned long long>(stats.trials),
              static_cast<unsigned long long>(seed));
  std::printf("informed mean      %.4f\n", stats.informed_mean);
  std::printf("informed std       %.4f\n", stats.informed_std);
  std::printf("informed min       %llu\n",
              static_cast<unsigned long long>(stats.informed_min));
  std::printf("full-block sends   %.4f (std %.4f)\n", stats.full_block_sends_mean,
              stats.full_block_sends_std);
  std::printf("failed trials      %llu\n", static_cast<unsigned long long>(stats.failures));
  return kExitOk;
}

int cmd_simulate(const config::ExperimentConfig& cfg) {
  const fs::path dir = prepare_out_dir(cfg);
  const auto result = experiment::run_dissemination(cfg);

  {
    std::ofstream out(dir / "latency.csv");
    metrics::write_latency_csv(out, result.trace);
  }
  {
    std::ofstream out(dir / "bandwidth.csv");
    metrics::write_bandwidth_csv(out, result.bandwidth);
  }
  ordered_json summary = ordered_json::parse(
      metrics::summary_json(result.latency, result.bandwidth));
  summary["protocol"] = {
      {"mode", proto::to_string(cfg.protocol.mode)},
      {"push_payload_sends", result.protocol_stats.push_payload_sends},
      {"digest_sends", result.protocol_stats.digest_sends},
      {"digest_request_sends", result.protocol_stats.digest_request_sends},
      {"pull_payload_blocks", result.protocol_stats.pull_payload_blocks},
      {"recovery_payload_blocks", result.protocol_stats.recovery_payload_blocks},
      {"messages_sent", result.protocol_stats.messages_sent},
      {"blocks", result.blocks},
  };
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  std::printf("blocks             %llu\n", static_cast<unsigned long long>(result.blocks));
  std::printf("max latency        %.3f ms\n", result.latency.max_latency_ms);
  std::printf("global mean        %.3f ms\n", result.latency.global_mean_ms);
  std::printf("payload bytes sent %llu\n",
              static_cast<unsigned long long>(result.bandwidth.total_payload_bytes_sent));
  std::printf("outputs in         %s\n", dir.string().c_str());

  if (!result.undelivered_seqs.empty()) {
    std::cerr << "undelivered blocks:";
    for (auto seq : result.undelivered_seqs) std::cerr << " " << seq;
    std::cerr << "\n";
    return kExitDelivery;
  }
  return kExitOk;
}

int cmd_conflicts(const config::ExperimentConfig& cfg) {
  const fs::path dir = prepare_out_dir(cfg);
  const auto cells = experiment::run_conflict_experiment(cfg);

  ordered_json doc = ordered_json::array();
  std::ostringstream csv;
  csv << "block_period_ms,mode,run,conflicts,blocks,txs_per_block_avg\n";
  std::printf("%-16s %12s %12s %10s\n", "block_period_ms", "baseline", "enhanced",
              "reduction");
  for (const auto& cell : cells) {
    for (std::size_t i = 0; i < cell.baseline_runs.size(); ++i) {
      const auto& b = cell.baseline_runs[i];
      const auto& e = cell.enhanced_runs[i];
      csv << cell.block_period_ms << ",baseline," << i << "," << b.conflicts << ","
          << b.blocks << "," << b.avg_txs_per_block << "\n";
      csv << cell.block_period_ms << ",enhanced," << i << "," << e.conflicts << ","
          << e.blocks << "," << e.avg_txs_per_block << "\n";
    }
    doc.push_back({{"block_period_ms", cell.block_period_ms},
                   {"runs", cell.baseline_runs.size()},
                   {"baseline_mean_conflicts", cell.baseline_mean},
                   {"enhanced_mean_conflicts", cell.enhanced_mean},
                   {"reduction", cell.reduction}});
    std::printf("%-16.0f %12.1f %12.1f %9.1f%%\n", cell.block_period_ms,
                cell.baseline_mean, cell.enhanced_mean, 100.0 * cell.reduction);
  }
  write_file(dir / "conflicts.json", doc.dump(2) + "\n");
  write_file(dir / "conflicts_runs.csv", csv.str());
  std::printf("outputs in         %s\n", dir.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gossip dissemination simulator and analysis toolkit"};
  app.require_subcommand(1);

  // ttl
  int ttl_n = 100, ttl_fout = 4;
  double ttl_pe = 1e-6;
  std::vector<int> table_ns;
  std::string ttl_out;
  auto* ttl_cmd = app.add_subcommand("ttl", "counter-cap analysis / lookup table");
  ttl_cmd->add_option("--n", ttl_n, "network size");
  ttl_cmd->add_option("--fout", ttl_fout, "forwarding fan-out");
  ttl_cmd->add_option("--pe", ttl_pe, "target probability of imperfect dissemination");
  ttl_cmd->add_option("--table", table_ns,
                      "emit a JSON lookup table for these network sizes");
  ttl_cmd->add_option("--out", ttl_out, "file for the JSON table (default stdout)");

  // montecarlo
  std::string mc_mode = "baseline";
  std::uint64_t mc_trials = 10000, mc_seed = 1;
  int mc_n = 100, mc_fout = 3, mc_ttl = -1, mc_ttl_direct = -1, mc_fout_leader = 0;
  auto* mc_cmd = app.add_subcommand("montecarlo", "connectivity-only dissemination trials");
  mc_cmd->add_option("--mode", mc_mode, "baseline or enhanced");
  mc_cmd->add_option("--trials", mc_trials, "number of trials")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--n", mc_n, "network size");
  mc_cmd->add_option("--fout", mc_fout, "forwarding fan-out");
  mc_cmd->add_option("--ttl", mc_ttl, "counter cap (enhanced)");
  mc_cmd->add_option("--ttl-direct", mc_ttl_direct, "full-push counter threshold (enhanced)");
  mc_cmd->add_option("--fout-leader", mc_fout_leader, "leader fan-out (enhanced)");
  mc_cmd->add_option("--seed", mc_seed, "trial seed");

  // simulate / conflicts share config handling
  std::string sim_config, sim_mode, sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  auto add_config_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", sim_config, "JSON experiment config");
    cmd->add_option("--mode", sim_mode, "override protocol mode preset");
    cmd->add_option("--seed", sim_seed, "override network seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    cmd->add_option("--out", sim_out, "override output directory");
  };
  auto* sim_cmd = app.add_subcommand("simulate", "timed dissemination of a block stream");
  add_config_flags(sim_cmd);
  auto* conf_cmd = app.add_subcommand("conflicts", "increment workload, both modes");
  add_config_flags(conf_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (ttl_cmd->parsed()) return cmd_ttl(ttl_n, ttl_fout, ttl_pe, table_ns, ttl_out);
    if (mc_cmd->parsed()) {
      return cmd_montecarlo(mc_mode, mc_trials, mc_n, mc_fout, mc_ttl, mc_ttl_direct,
                            mc_fout_leader, mc_seed);
    }
    const auto cfg =
        load_effective_config(sim_config, sim_mode, sim_seed, sim_seed_set, sim_out);
    if (sim_cmd->parsed()) return cmd_simulate(cfg);
    return cmd_conflicts(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
