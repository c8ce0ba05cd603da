#include "gossipsim/montecarlo.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

namespace gossipsim::montecarlo {

namespace {

struct Accumulator {
  std::uint64_t trials = 0;
  std::uint64_t informed_sum = 0;
  std::uint64_t informed_sq_sum = 0;
  std::uint64_t informed_min = UINT64_MAX;
  std::uint64_t sends_sum = 0;
  std::uint64_t sends_sq_sum = 0;
  std::uint64_t failures = 0;

  void add(std::uint64_t informed, std::uint64_t sends, bool failed) {
    ++trials;
    informed_sum += informed;
    informed_sq_sum += informed * informed;
    informed_min = std::min(informed_min, informed);
    sends_sum += sends;
    sends_sq_sum += sends * sends;
    if (failed) ++failures;
  }

  TrialStats finish() const {
    TrialStats s;
    s.trials = trials;
    if (trials == 0) return s;
    const double t = static_cast<double>(trials);
    s.informed_mean = static_cast<double>(informed_sum) / t;
    s.informed_std = std::sqrt(
        std::max(0.0, static_cast<double>(informed_sq_sum) / t - s.informed_mean * s.informed_mean));
    s.informed_min = informed_min;
    s.full_block_sends_mean = static_cast<double>(sends_sum) / t;
    s.full_block_sends_std = std::sqrt(std::max(
        0.0, static_cast<double>(sends_sq_sum) / t - s.full_block_sends_mean * s.full_block_sends_mean));
    s.failures = failures;
    return s;
  }
};

// k distinct targets from {0..n-1} \ {self}, written into out.
void sample_targets(int n, int self, int k, std::mt19937_64& rng,
                    std::vector<int>& scratch, std::vector<int>& out) {
  scratch.clear();
  for (int p = 0; p < n; ++p) {
    if (p != self) scratch.push_back(p);
  }
  out.clear();
  for (int i = 0; i < k; ++i) {
    const auto j = std::uniform_int_distribution<std::size_t>(i, scratch.size() - 1)(rng);
    std::swap(scratch[i], scratch[j]);
    out.push_back(scratch[i]);
  }
}

}  // namespace

TrialStats run_baseline_trials(int n, int fan_out, std::uint64_t trials, std::uint64_t seed) {
  if (n < 2 || fan_out < 1 || fan_out > n - 1) {
    throw std::domain_error("run_baseline_trials: invalid parameters");
  }
  Accumulator acc;
  std::vector<char> informed(n);
  std::vector<int> frontier, scratch, targets;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(sim::splitmix64(seed ^ sim::splitmix64(t + 1)));
    std::fill(informed.begin(), informed.end(), 0);
    frontier.clear();
    informed[0] = 1;  // leader
    frontier.push_back(0);
    std::uint64_t sends = 0;
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      sample_targets(n, frontier[i], fan_out, rng, scratch, targets);
      sends += fan_out;
      for (int peer : targets) {
        if (!informed[peer]) {
          informed[peer] = 1;
          ++count;
          frontier.push_back(peer);
        }
      }
    }
    acc.add(count, sends, count < static_cast<std::uint64_t>(n));
  }
  return acc.finish();
}

TrialStats run_enhanced_trials(int n, int fan_out, int ttl, int ttl_direct,
                               int fan_out_leader, std::uint64_t trials,
                               std::uint64_t seed) {
  if (n < 2 || fan_out < 1 || fan_out > n - 1 || ttl < 1 || ttl_direct < 0 ||
      ttl_direct > ttl || fan_out_leader < 1 || fan_out_leader > n - 1 || ttl > 63) {
    throw std::domain_error("run_enhanced_trials: invalid parameters");
  }
  Accumulator acc;
  std::vector<std::uint64_t> seen_counters(n);  // bitmask over counter values
  struct Reception {
    int peer;
    int counter;
    bool full;
  };
  std::deque<Reception> queue;
  std::vector<int> scratch, targets;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(sim::splitmix64(seed ^ sim::splitmix64(t + 1)));
    std::fill(seen_counters.begin(), seen_counters.end(), 0);
    queue.clear();
    std::uint64_t informed = 1;  // leader holds the payload
    std::uint64_t full_sends = 0;
    std::vector<char> has_payload(n, 0);
    has_payload[0] = 1;
    sample_targets(n, 0, fan_out_leader, rng, scratch, targets);
    full_sends += fan_out_leader;
    for (int peer : targets) queue.push_back({peer, 0, true});
    while (!queue.empty()) {
      const Reception r = queue.front();
      queue.pop_front();
      const std::uint64_t bit = 1ULL << r.counter;
      if (seen_counters[r.peer] & bit) continue;
      seen_counters[r.peer] |= bit;
      if (!has_payload[r.peer]) {
        has_payload[r.peer] = 1;
        ++informed;
        if (!r.full) full_sends += 1;  // digest triggers one payload fetch
      }
      const int next = r.counter + 1;
      if (next > ttl) continue;
      sample_targets(n, r.peer, fan_out, rng, scratch, targets);
      const bool next_full = next <= ttl_direct;
      if (next_full) full_sends += fan_out;
      for (int peer : targets) queue.push_back({peer, next, next_full});
    }
    acc.add(informed, full_sends, informed < static_cast<std::uint64_t>(n));
  }
  return acc.finish();
}

TrialStats run_trials(const proto::ProtocolConfig& cfg, std::uint64_t trials,
                      std::uint64_t seed) {
  cfg.validate();
  if (cfg.mode == proto::Mode::baseline) {
    return run_baseline_trials(cfg.n, cfg.fan_out, trials, seed);
  }
  return run_enhanced_trials(cfg.n, cfg.fan_out, cfg.ttl, cfg.ttl_direct,
                             cfg.fan_out_leader, trials, seed);
}

}  // namespace gossipsim::montecarlo
