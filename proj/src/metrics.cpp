#include "gossipsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gossipsim::metrics {

DisseminationTrace::DisseminationTrace(int n_peers, double bucket_ms)
    : n_peers_(n_peers), bucket_ms_(bucket_ms) {
  if (n_peers_ < 1) throw std::domain_error("DisseminationTrace: need at least one peer");
  if (bucket_ms_ <= 0) throw std::domain_error("DisseminationTrace: bucket must be positive");
  buckets_.resize(n_peers_);
}

void DisseminationTrace::begin_block(std::uint64_t seq, double t_start_ms) {
  if (index_by_seq_.count(seq)) {
    throw std::logic_error("DisseminationTrace: block started twice");
  }
  index_by_seq_[seq] = blocks_.size();
  BlockTrace bt;
  bt.seq = seq;
  bt.t_start_ms = t_start_ms;
  bt.recv_ms.assign(n_peers_, kNotReceived);
  blocks_.push_back(std::move(bt));
}

void DisseminationTrace::record_receipt(std::uint64_t seq, sim::PeerId peer, double t_ms) {
  auto it = index_by_seq_.find(seq);
  if (it == index_by_seq_.end()) {
    throw std::logic_error("DisseminationTrace: receipt for unknown block");
  }
  BlockTrace& bt = blocks_[it->second];
  if (t_ms < bt.t_start_ms) {
    throw std::logic_error("DisseminationTrace: receipt before dissemination start");
  }
  double& cell = bt.recv_ms.at(peer);
  if (std::isnan(cell)) cell = t_ms;  // first payload receipt wins
}

void DisseminationTrace::record_bytes(double t_ms, sim::PeerId peer, bool sent,
                                      std::size_t wire_bytes, std::size_t payload_bytes) {
  auto& row = buckets_.at(peer);
  const auto idx = static_cast<std::size_t>(t_ms / bucket_ms_);
  if (row.size() <= idx) row.resize(idx + 1);
  if (sent) {
    row[idx].bytes_sent += wire_bytes;
    row[idx].payload_bytes_sent += payload_bytes;
  } else {
    row[idx].bytes_received += wire_bytes;
  }
}

double DisseminationTrace::latency_ms(std::size_t block_index, sim::PeerId peer) const {
  const BlockTrace& bt = blocks_.at(block_index);
  const double t = bt.recv_ms.at(peer);
  return std::isnan(t) ? kNotReceived : t - bt.t_start_ms;
}

std::uint64_t DisseminationTrace::undelivered_cells() const {
  std::uint64_t missing = 0;
  for (const auto& bt : blocks_) {
    for (double t : bt.recv_ms) {
      if (std::isnan(t)) ++missing;
    }
  }
  return missing;
}

Percentiles percentiles(std::vector<double> values) {
  Percentiles p;
  if (values.empty()) return p;
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * values.size()));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
  };
  p.p50 = at(0.50);
  p.p95 = at(0.95);
  p.p99 = at(0.99);
  p.p100 = values.back();
  return p;
}

namespace {

double mean_ignoring_missing(const std::vector<double>& values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : values) {
    if (!std::isnan(v)) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? kNotReceived : sum / static_cast<double>(count);
}

// index of slowest / median / fastest entry by value
template <typename Id>
void rank_by_mean(const std::vector<double>& means, const std::vector<Id>& ids,
                  Id& slowest, Id& median, Id& fastest) {
  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
  fastest = ids[order.front()];
  median = ids[order[order.size() / 2]];
  slowest = ids[order.back()];
}

}  // namespace

LatencySummary latency_cdfs(const DisseminationTrace& trace) {
  LatencySummary s;
  s.n_blocks = trace.blocks().size();
  s.n_peers = trace.n_peers();
  s.undelivered = trace.undelivered_cells();
  if (s.n_blocks == 0) return s;

  std::vector<double> all;
  all.reserve(s.n_blocks * trace.n_peers());
  std::vector<std::vector<double>> by_peer(trace.n_peers());
  s.per_block_mean_ms.reserve(s.n_blocks);
  for (std::size_t b = 0; b < s.n_blocks; ++b) {
    std::vector<double> row;
    row.reserve(trace.n_peers());
    for (int p = 0; p < trace.n_peers(); ++p) {
      const double lat = trace.latency_ms(b, p);
      row.push_back(lat);
      if (!std::isnan(lat)) {
        all.push_back(lat);
        by_peer[p].push_back(lat);
      }
    }
    s.per_block_mean_ms.push_back(mean_ignoring_missing(row));
  }
  s.per_peer_mean_ms.reserve(trace.n_peers());
  for (int p = 0; p < trace.n_peers(); ++p) {
    s.per_peer_mean_ms.push_back(mean_ignoring_missing(by_peer[p]));
  }

  std::vector<sim::PeerId> peer_ids(trace.n_peers());
  std::iota(peer_ids.begin(), peer_ids.end(), 0);
  rank_by_mean(s.per_peer_mean_ms, peer_ids, s.slowest_peer, s.median_peer, s.fastest_peer);

  std::vector<std::uint64_t> block_seqs;
  block_seqs.reserve(s.n_blocks);
  for (const auto& bt : trace.blocks()) block_seqs.push_back(bt.seq);
  rank_by_mean(s.per_block_mean_ms, block_seqs, s.slowest_block, s.median_block,
               s.fastest_block);

  s.overall = percentiles(all);
  s.max_latency_ms = all.empty() ? 0.0 : *std::max_element(all.begin(), all.end());
  s.global_mean_ms = mean_ignoring_missing(all);
  return s;
}

BandwidthSeries bandwidth_series(const DisseminationTrace& trace) {
  BandwidthSeries series;
  series.bucket_ms = trace.bucket_ms();
  std::size_t n_buckets = 0;
  for (const auto& row : trace.buckets()) n_buckets = std::max(n_buckets, row.size());
  series.n_buckets = n_buckets;
  series.per_peer.resize(trace.n_peers());
  const double bucket_s = series.bucket_ms / 1000.0;
  for (int p = 0; p < trace.n_peers(); ++p) {
    auto row = trace.buckets()[p];
    row.resize(n_buckets);
    std::uint64_t sent = 0, received = 0, payload = 0;
    for (const auto& b : row) {
      sent += b.bytes_sent;
      received += b.bytes_received;
      payload += b.payload_bytes_sent;
    }
    series.total_bytes_sent += sent;
    series.total_bytes_received += received;
    series.total_payload_bytes_sent += payload;
    const double duration_s = static_cast<double>(n_buckets) * bucket_s;
    series.mean_bytes_per_s_sent.push_back(
        n_buckets == 0 ? 0.0 : static_cast<double>(sent) / duration_s);
    series.mean_bytes_per_s_received.push_back(
        n_buckets == 0 ? 0.0 : static_cast<double>(received) / duration_s);
    series.per_peer[p] = std::move(row);
  }
  return series;
}

void write_latency_csv(std::ostream& out, const DisseminationTrace& trace) {
  out << "block_seq,peer_id,latency_ms\n";
  for (std::size_t b = 0; b < trace.blocks().size(); ++b) {
    const auto& bt = trace.blocks()[b];
    for (int p = 0; p < trace.n_peers(); ++p) {
      const double lat = trace.latency_ms(b, p);
      out << bt.seq << ',' << p << ',';
      if (std::isnan(lat)) {
        out << "\n";
      } else {
        out << lat << "\n";
      }
    }
  }
}

void write_bandwidth_csv(std::ostream& out, const BandwidthSeries& series) {
  out << "peer_id,bucket_start_ms,bytes_sent,bytes_received,payload_bytes_sent\n";
  for (std::size_t p = 0; p < series.per_peer.size(); ++p) {
    for (std::size_t i = 0; i < series.per_peer[p].size(); ++i) {
      const auto& b = series.per_peer[p][i];
      out << p << ',' << i * series.bucket_ms << ',' << b.bytes_sent << ','
          << b.bytes_received << ',' << b.payload_bytes_sent << "\n";
    }
  }
}

std::string summary_json(const LatencySummary& latency, const BandwidthSeries& bandwidth) {
  nlohmann::ordered_json j;
  j["latency"] = {
      {"blocks", latency.n_blocks},
      {"peers", latency.n_peers},
      {"undelivered_cells", latency.undelivered},
      {"global_mean_ms", latency.global_mean_ms},
      {"max_ms", latency.max_latency_ms},
      {"p50_ms", latency.overall.p50},
      {"p95_ms", latency.overall.p95},
      {"p99_ms", latency.overall.p99},
      {"p100_ms", latency.overall.p100},
      {"slowest_peer", latency.slowest_peer},
      {"median_peer", latency.median_peer},
      {"fastest_peer", latency.fastest_peer},
      {"slowest_block", latency.slowest_block},
      {"median_block", latency.median_block},
      {"fastest_block", latency.fastest_block},
  };
  j["bandwidth"] = {
      {"bucket_ms", bandwidth.bucket_ms},
      {"buckets", bandwidth.n_buckets},
      {"total_bytes_sent", bandwidth.total_bytes_sent},
      {"total_bytes_received", bandwidth.total_bytes_received},
      {"total_payload_bytes_sent", bandwidth.total_payload_bytes_sent},
  };
  return j.dump(2);
}

}  // namespace gossipsim::metrics
