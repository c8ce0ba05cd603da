#pragma once

#include <cstdint>
#include <vector>

#include "gossipsim/config.hpp"
#include "gossipsim/metrics.hpp"
#include "gossipsim/protocol.hpp"

namespace gossipsim::experiment {

struct DisseminationResult {
  metrics::DisseminationTrace trace;
  metrics::LatencySummary latency;
  metrics::BandwidthSeries bandwidth;
  proto::ProtocolStats protocol_stats;
  std::uint64_t blocks = 0;
  std::uint64_t undelivered_cells = 0;
  std::vector<std::uint64_t> undelivered_seqs;
};

// Timed dissemination of the configured block stream under the configured
// gossip mode; every block carries the same payload size.
DisseminationResult run_dissemination(const config::ExperimentConfig& cfg);

struct ConflictRun {
  std::uint64_t conflicts = 0;
  double avg_txs_per_block = 0.0;
  std::uint64_t blocks = 0;
};

struct ConflictCell {
  double block_period_ms = 0.0;
  std::vector<ConflictRun> baseline_runs;
  std::vector<ConflictRun> enhanced_runs;
  double baseline_mean = 0.0;
  double enhanced_mean = 0.0;
  double reduction = 0.0;  // 1 - enhanced/baseline
};

// One increment-workload run under one gossip mode and block period.
// Baseline and enhanced runs sharing a run index also share their seeds, so
// the two modes face the identical workload (paired comparison).
ConflictRun run_conflict_once(const config::ExperimentConfig& cfg, proto::Mode mode,
                              double block_period_ms, std::uint64_t run_index);

// Full grid: every configured block period, both modes, conflict_runs each.
std::vector<ConflictCell> run_conflict_experiment(const config::ExperimentConfig& cfg);

}  // namespace gossipsim::experiment
