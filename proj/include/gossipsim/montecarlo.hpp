#pragma once

#include <cstdint>

#include "gossipsim/protocol.hpp"

namespace gossipsim::montecarlo {

// Aggregate over connectivity-only dissemination trials (no latency model;
// a trial tracks which peers are reached and how many full blocks move).
struct TrialStats {
  std::uint64_t trials = 0;
  double informed_mean = 0.0;
  double informed_std = 0.0;
  std::uint64_t informed_min = 0;
  double full_block_sends_mean = 0.0;
  double full_block_sends_std = 0.0;
  std::uint64_t failures = 0;  // trials leaving at least one peer uninformed
};

// Infect-and-die push: every newly infected peer forwards once to fan_out
// peers sampled without replacement excluding itself.
TrialStats run_baseline_trials(int n, int fan_out, std::uint64_t trials,
                               std::uint64_t seed);

// Counter-bounded push: every first receipt of a (block, counter) pair
// triggers one forward until the counter cap; first contact through a digest
// costs one payload fetch.
TrialStats run_enhanced_trials(int n, int fan_out, int ttl, int ttl_direct,
                               int fan_out_leader, std::uint64_t trials,
                               std::uint64_t seed);

TrialStats run_trials(const proto::ProtocolConfig& cfg, std::uint64_t trials,
                      std::uint64_t seed);

}  // namespace gossipsim::montecarlo
