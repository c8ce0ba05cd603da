#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gossipsim/engine.hpp"
#include "gossipsim/protocol.hpp"

namespace gossipsim::config {

struct NetworkConfig {
  sim::LatencyModel latency;
  double drop_probability = 0.0;
  std::uint64_t seed = 1;
};

struct WorkloadConfig {
  // Dissemination stream (simulate subcommand).
  int blocks = 1000;
  std::size_t block_bytes = 160000;
  double block_interval_ms = 1500.0;
  double drain_ms = 60000.0;

  // Transaction workload (conflicts subcommand).
  int n_keys = 100;
  int rounds = 100;
  double rate_tx_per_s = 5.0;
  int max_txs = 50;
  double block_timer_ms = 2000.0;
  double validation_ms_per_tx = 50.0;
  double ordering_delay_ms = 600.0;
  int tx_bytes = 3200;
  std::vector<double> conflict_block_periods_ms{2000.0, 1500.0, 1000.0, 750.0};
  int conflict_runs = 5;
};

struct OutputConfig {
  std::string dir = "out";
};

struct ExperimentConfig {
  proto::ProtocolConfig protocol = proto::default_protocol_config(proto::Mode::baseline);
  NetworkConfig network;
  WorkloadConfig workload;
  OutputConfig output;

  void validate() const;  // throws std::invalid_argument
};

ExperimentConfig default_config(proto::Mode mode);

// Strict parser: unknown keys anywhere in the document are rejected. Values
// overlay mode-appropriate defaults; "protocol.mode" is read first so the
// remaining protocol keys apply on top of that mode's defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Fully resolved configuration, suitable for re-running the experiment.
std::string to_json(const ExperimentConfig& cfg);

}  // namespace gossipsim::config
