#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gossipsim/engine.hpp"
#include "gossipsim/message.hpp"

namespace gossipsim::proto {

enum class Mode { baseline, enhanced };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct ProtocolConfig {
  Mode mode = Mode::baseline;
  int n = 100;
  int fan_out = 3;
  int fan_out_leader = 1;  // enhanced only
  int fan_in = 3;          // baseline pull contacts
  double t_push_ms = 10.0;
  double t_pull_ms = 4000.0;      // 0 disables (forced off in enhanced mode)
  double t_recovery_ms = 10000.0; // 0 disables
  double advert_period_ms = 1000.0;  // height metadata gossip; 0 disables
  int ttl = 0;          // enhanced only
  int ttl_direct = 0;   // counters <= ttl_direct push the full block
  int digest_bytes = 64;
  int push_buffer_cap = 10;  // baseline push buffer
  int pull_window = 16;      // recent seqs advertised per pull response

  void validate() const;  // throws std::invalid_argument
};

// Mode-appropriate defaults; the enhanced preset mirrors the n=100 deployment
// (fan_out 4, ttl 9, ttl_direct 2, no push buffering, no pull).
ProtocolConfig default_protocol_config(Mode mode);

struct PeerState {
  sim::PeerId id = 0;
  std::set<std::uint64_t> held;                      // block seqs with payload stored
  std::set<std::pair<std::uint64_t, int>> seen_pairs;  // enhanced (seq, counter)
  std::set<std::uint64_t> infected;                  // baseline: push already consumed
  std::uint64_t height = 0;                          // longest consecutive prefix held
  std::vector<BlockPtr> push_buffer;                 // baseline
  bool flush_scheduled = false;
  std::map<std::uint64_t, std::vector<int>> deferred_forwards;  // seq -> counters
  std::set<std::uint64_t> outstanding_requests;      // one digest request in flight per seq
  std::vector<std::uint64_t> known_heights;          // advertised height per peer
};

struct ProtocolStats {
  std::uint64_t push_payload_sends = 0;   // PushBlock messages (incl. digest responses)
  std::uint64_t digest_sends = 0;         // BlockDigest messages
  std::uint64_t digest_request_sends = 0;
  std::uint64_t pull_payload_blocks = 0;  // blocks served through pull
  std::uint64_t recovery_payload_blocks = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t blocks_delivered_by_orderer = 0;
};

// Both gossip state machines, driven by a single-threaded engine. Peer 0 is
// the leader; it receives every block from the orderer stub.
class GossipNetwork {
 public:
  static constexpr sim::PeerId kLeader = 0;

  using ReceiptHook =
      std::function<void(std::uint64_t seq, sim::PeerId peer, double t_ms)>;

  GossipNetwork(sim::Engine& engine, sim::Network& network, ProtocolConfig config);

  // Arms the periodic timers (pull, recovery, height adverts).
  void start();

  void orderer_deliver(const BlockPtr& block);

  void set_receipt_hook(ReceiptHook hook) { receipt_hook_ = std::move(hook); }

  const ProtocolConfig& config() const { return cfg_; }
  const PeerState& peer(sim::PeerId id) const { return peers_.at(id); }
  const ProtocolStats& stats() const { return stats_; }
  const BlockPtr& block(std::uint64_t seq) const;
  bool has_block(std::uint64_t seq) const;
  std::uint64_t initial_gossiper_count(sim::PeerId id) const {
    return initial_gossiper_counts_.at(id);
  }

  // Peers holding every block delivered so far.
  int fully_informed_peers() const;

 private:
  void send_msg(sim::PeerId from, sim::PeerId to, GossipMessage msg);
  void handle(sim::PeerId self, sim::PeerId from, const GossipMessage& msg);

  void handle_push_baseline(sim::PeerId self, const PushBlock& msg);
  void handle_push_enhanced(sim::PeerId self, const PushBlock& msg);
  void handle_digest(sim::PeerId self, sim::PeerId from, const BlockDigest& msg);
  void handle_digest_request(sim::PeerId self, sim::PeerId from, const DigestRequest& msg);
  void handle_pull_digest_request(sim::PeerId self, sim::PeerId from);
  void handle_pull_digest_response(sim::PeerId self, sim::PeerId from,
                                   const PullDigestResponse& msg);
  void handle_pull_block_request(sim::PeerId self, sim::PeerId from,
                                 const PullBlockRequest& msg);
  void handle_height_advert(sim::PeerId self, sim::PeerId from, const HeightAdvert& msg);
  void handle_recovery_request(sim::PeerId self, sim::PeerId from,
                               const RecoveryRequest& msg);

  void flush_push_buffer(sim::PeerId self);
  void do_pull(sim::PeerId self);
  void do_advert(sim::PeerId self);
  void do_recovery(sim::PeerId self);

  // Stores the payload if missing; fires the receipt hook and releases any
  // deferred forwards. Returns true on first storage.
  bool store_payload(sim::PeerId self, const BlockPtr& block);
  void forward_pair(sim::PeerId self, const BlockPtr& block, int counter);

  std::vector<sim::PeerId> sample_peers(sim::PeerId self, int count,
                                        std::mt19937_64& rng);
  void schedule_periodic(double phase_ms, double period_ms, std::function<void()> fn);

  sim::Engine& engine_;
  sim::Network& net_;
  ProtocolConfig cfg_;
  std::vector<PeerState> peers_;
  std::vector<std::mt19937_64> peer_rng_;
  std::vector<BlockPtr> blocks_by_seq_;  // index seq - 1
  std::vector<std::uint64_t> initial_gossiper_counts_;
  ProtocolStats stats_;
  ReceiptHook receipt_hook_;
};

}  // namespace gossipsim::proto
