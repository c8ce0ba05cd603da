#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <vector>

namespace gossipsim::sim {

using PeerId = int;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kNoTimeLimit = std::numeric_limits<double>::infinity();

struct SimulationSummary {
  double clock_ms = 0.0;
  std::uint64_t events_executed = 0;
};

// Single-threaded virtual-time event loop. Events with equal timestamps fire
// in insertion order, so a run is fully determined by the seed and the
// schedule of external inputs.
class Engine {
 public:
  explicit Engine(std::uint64_t seed)
      : seed_(seed), rng_(splitmix64(seed)) {}

  double now() const { return now_; }
  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& rng() { return rng_; }

  // Independent stream derived from the engine seed, e.g. one per peer.
  std::mt19937_64 derived_rng(std::uint64_t stream) const {
    return std::mt19937_64(splitmix64(seed_ ^ splitmix64(stream + 1)));
  }

  void schedule_at(double t_ms, std::function<void()> fn);
  void schedule_after(double delay_ms, std::function<void()> fn) {
    schedule_at(now_ + delay_ms, std::move(fn));
  }

  // Executes all events with time <= t_end_ms, in order, and advances the
  // clock to t_end_ms (or to the last event for an unbounded run).
  SimulationSummary run_until(double t_end_ms = kNoTimeLimit);

  std::size_t pending_events() const { return queue_.size(); }

 private:
  struct Event {
    double t;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  double now_ = 0.0;
  std::uint64_t seed_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t events_executed_ = 0;
  std::mt19937_64 rng_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

// Per-message delivery delay:
//   base_ms + per_byte_us * size_bytes / 1000 + U(0, jitter_ms)
struct LatencyModel {
  double base_ms = 0.5;
  double per_byte_us = 0.008;  // ~1 Gbps serialization
  double jitter_ms = 0.2;

  void validate() const;  // throws std::domain_error
};

struct ByteCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t payload_bytes_sent = 0;
  std::uint64_t payload_bytes_received = 0;
  std::uint64_t messages_sent = 0;
};

// Lossless-by-default message transport between n peers. Byte counters are
// charged at delivery time; a sink hook mirrors them into metrics.
class Network {
 public:
  using ByteSink =
      std::function<void(double t_ms, PeerId from, PeerId to, std::size_t wire_bytes,
                         std::size_t payload_bytes)>;

  Network(Engine& engine, const LatencyModel& latency, int n_peers,
          double drop_probability = 0.0);

  void send(PeerId from, PeerId to, std::size_t wire_bytes, std::size_t payload_bytes,
            std::function<void()> on_deliver);

  double delay_for(std::size_t wire_bytes);  // draws jitter from the engine rng

  const ByteCounters& counters(PeerId peer) const { return counters_.at(peer); }
  int n_peers() const { return static_cast<int>(counters_.size()); }
  std::uint64_t total_bytes_sent() const;
  std::uint64_t total_bytes_received() const;
  std::uint64_t total_payload_bytes_sent() const;

  void set_byte_sink(ByteSink sink) { sink_ = std::move(sink); }

 private:
  Engine& engine_;
  LatencyModel latency_;
  double drop_probability_;
  std::vector<ByteCounters> counters_;
  ByteSink sink_;
};

}  // namespace gossipsim::sim
