#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gossipsim/metrics.hpp"

using namespace gossipsim;
using namespace gossipsim::metrics;

TEST_CASE("receipt cells fill exactly once") {
  DisseminationTrace trace(3);
  trace.begin_block(1, 100.0);
  trace.record_receipt(1, 0, 100.0);  // contact peer, latency 0
  trace.record_receipt(1, 1, 150.0);
  trace.record_receipt(1, 1, 170.0);  // duplicate payload, ignored
  CHECK(trace.latency_ms(0, 0) == doctest::Approx(0.0));
  CHECK(trace.latency_ms(0, 1) == doctest::Approx(50.0));
  CHECK(std::isnan(trace.latency_ms(0, 2)));
  CHECK(trace.undelivered_cells() == 1);

  CHECK_THROWS_AS(trace.begin_block(1, 0.0), std::logic_error);
  CHECK_THROWS_AS(trace.record_receipt(2, 0, 5.0), std::logic_error);
  CHECK_THROWS_AS(trace.record_receipt(1, 2, 99.0), std::logic_error);  // before start
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> values;
  for (int i = 1; i <= 100; ++i) values.push_back(i);
  const auto p = percentiles(values);
  CHECK(p.p50 == doctest::Approx(50.0));
  CHECK(p.p95 == doctest::Approx(95.0));
  CHECK(p.p99 == doctest::Approx(99.0));
  CHECK(p.p100 == doctest::Approx(100.0));
  const auto single = percentiles({7.0});
  CHECK(single.p50 == doctest::Approx(7.0));
  CHECK(single.p100 == doctest::Approx(7.0));
}

TEST_CASE("latency summary and the transpose identity") {
  DisseminationTrace trace(3);
  trace.begin_block(1, 0.0);
  trace.record_receipt(1, 0, 0.0);
  trace.record_receipt(1, 1, 10.0);
  trace.record_receipt(1, 2, 40.0);
  trace.begin_block(2, 100.0);
  trace.record_receipt(2, 0, 100.0);
  trace.record_receipt(2, 1, 130.0);
  trace.record_receipt(2, 2, 120.0);

  const auto s = latency_cdfs(trace);
  CHECK(s.n_blocks == 2);
  CHECK(s.undelivered == 0);
  CHECK(s.per_peer_mean_ms[0] == doctest::Approx(0.0));
  CHECK(s.per_peer_mean_ms[1] == doctest::Approx(20.0));
  CHECK(s.per_peer_mean_ms[2] == doctest::Approx(30.0));
  CHECK(s.per_block_mean_ms[0] == doctest::Approx(50.0 / 3));
  CHECK(s.per_block_mean_ms[1] == doctest::Approx(50.0 / 3));
  CHECK(s.fastest_peer == 0);
  CHECK(s.slowest_peer == 2);
  CHECK(s.max_latency_ms == doctest::Approx(40.0));

  // peer view and block view are transposes of one trace
  double peer_mean = 0.0;
  for (double m : s.per_peer_mean_ms) peer_mean += m;
  peer_mean /= s.per_peer_mean_ms.size();
  double block_mean = 0.0;
  for (double m : s.per_block_mean_ms) block_mean += m;
  block_mean /= s.per_block_mean_ms.size();
  CHECK(peer_mean == doctest::Approx(block_mean));
  CHECK(s.global_mean_ms == doctest::Approx(peer_mean));
}

TEST_CASE("bandwidth buckets at 10 s") {
  DisseminationTrace trace(2);
  trace.record_bytes(500.0, 0, true, 1000, 600);
  trace.record_bytes(500.0, 1, false, 1000, 600);
  trace.record_bytes(15000.0, 0, true, 200, 0);
  trace.record_bytes(15000.0, 1, false, 200, 0);

  const auto series = bandwidth_series(trace);
  CHECK(series.n_buckets == 2);
  CHECK(series.per_peer[0][0].bytes_sent == 1000);
  CHECK(series.per_peer[0][0].payload_bytes_sent == 600);
  CHECK(series.per_peer[0][1].bytes_sent == 200);
  CHECK(series.per_peer[1][0].bytes_received == 1000);
  CHECK(series.total_bytes_sent == 1200);
  CHECK(series.total_bytes_received == 1200);  // conservation
  CHECK(series.total_payload_bytes_sent == 600);
  // mean of buckets equals total over duration
  CHECK(series.mean_bytes_per_s_sent[0] == doctest::Approx(1200.0 / 20.0));
  CHECK(series.mean_bytes_per_s_received[1] == doctest::Approx(1200.0 / 20.0));
}

TEST_CASE("idle trace has zero gossip bytes") {
  DisseminationTrace trace(4);
  const auto series = bandwidth_series(trace);
  CHECK(series.n_buckets == 0);
  CHECK(series.total_bytes_sent == 0);
}

TEST_CASE("csv exports") {
  DisseminationTrace trace(2);
  trace.begin_block(1, 0.0);
  trace.record_receipt(1, 0, 0.0);
  trace.record_bytes(100.0, 0, true, 50, 25);

  std::ostringstream latency;
  write_latency_csv(latency, trace);
  CHECK(latency.str() ==
        "block_seq,peer_id,latency_ms\n"
        "1,0,0\n"
        "1,1,\n");

  std::ostringstream bandwidth;
  write_bandwidth_csv(bandwidth, bandwidth_series(trace));
  CHECK(bandwidth.str() ==
        "peer_id,bucket_start_ms,bytes_sent,bytes_received,payload_bytes_sent\n"
        "0,0,50,0,25\n"
        "1,0,0,0,0\n");
}

TEST_CASE("summary json is well formed") {
  DisseminationTrace trace(2);
  trace.begin_block(1, 0.0);
  trace.record_receipt(1, 0, 0.0);
  trace.record_receipt(1, 1, 5.0);
  trace.record_bytes(1.0, 0, true, 10, 10);
  const auto doc =
      nlohmann::json::parse(summary_json(latency_cdfs(trace), bandwidth_series(trace)));
  CHECK(doc.at("latency").at("blocks") == 1);
  CHECK(doc.at("latency").at("max_ms") == doctest::Approx(5.0));
  CHECK(doc.at("latency").at("undelivered_cells") == 0);
  CHECK(doc.at("bandwidth").at("total_bytes_sent") == 10);
}
