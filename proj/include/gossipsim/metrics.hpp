#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gossipsim/engine.hpp"

namespace gossipsim::metrics {

constexpr double kNotReceived = std::numeric_limits<double>::quiet_NaN();

struct BlockTrace {
  std::uint64_t seq = 0;
  double t_start_ms = 0.0;         // receipt by the initial contact peer
  std::vector<double> recv_ms;     // absolute first-receipt time per peer, NaN if missing
};

struct ByteBucket {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t payload_bytes_sent = 0;
};

// Raw material of every latency and bandwidth figure: first-receipt times per
// (block, peer) plus time-bucketed byte counters per peer.
class DisseminationTrace {
 public:
  explicit DisseminationTrace(int n_peers, double bucket_ms = 10000.0);

  void begin_block(std::uint64_t seq, double t_start_ms);
  void record_receipt(std::uint64_t seq, sim::PeerId peer, double t_ms);
  void record_bytes(double t_ms, sim::PeerId peer, bool sent, std::size_t wire_bytes,
                    std::size_t payload_bytes);

  int n_peers() const { return n_peers_; }
  double bucket_ms() const { return bucket_ms_; }
  const std::vector<BlockTrace>& blocks() const { return blocks_; }
  const std::vector<std::vector<ByteBucket>>& buckets() const { return buckets_; }

  double latency_ms(std::size_t block_index, sim::PeerId peer) const;
  std::uint64_t undelivered_cells() const;

 private:
  int n_peers_;
  double bucket_ms_;
  std::vector<BlockTrace> blocks_;
  std::map<std::uint64_t, std::size_t> index_by_seq_;
  std::vector<std::vector<ByteBucket>> buckets_;  // [peer][bucket]
};

struct Percentiles {
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double p100 = 0.0;
};

Percentiles percentiles(std::vector<double> values);

struct LatencySummary {
  std::size_t n_blocks = 0;
  int n_peers = 0;
  std::uint64_t undelivered = 0;

  std::vector<double> per_peer_mean_ms;   // mean over delivered blocks
  std::vector<double> per_block_mean_ms;  // mean over informed peers
  sim::PeerId slowest_peer = 0, median_peer = 0, fastest_peer = 0;
  std::uint64_t slowest_block = 0, median_block = 0, fastest_block = 0;

  Percentiles overall;      // over every delivered (block, peer) cell
  double max_latency_ms = 0.0;
  double global_mean_ms = 0.0;
};

LatencySummary latency_cdfs(const DisseminationTrace& trace);

struct BandwidthSeries {
  double bucket_ms = 0.0;
  std::size_t n_buckets = 0;
  std::vector<std::vector<ByteBucket>> per_peer;  // padded to n_buckets
  std::vector<double> mean_bytes_per_s_sent;      // per peer
  std::vector<double> mean_bytes_per_s_received;
  std::uint64_t total_bytes_sent = 0;
  std::uint64_t total_bytes_received = 0;
  std::uint64_t total_payload_bytes_sent = 0;
};

BandwidthSeries bandwidth_series(const DisseminationTrace& trace);

// CSV columns: block_seq, peer_id, latency_ms ("" when undelivered).
void write_latency_csv(std::ostream& out, const DisseminationTrace& trace);

// CSV columns: peer_id, bucket_start_ms, bytes_sent, bytes_received,
// payload_bytes_sent.
void write_bandwidth_csv(std::ostream& out, const BandwidthSeries& series);

std::string summary_json(const LatencySummary& latency, const BandwidthSeries& bandwidth);

}  // namespace gossipsim::metrics
