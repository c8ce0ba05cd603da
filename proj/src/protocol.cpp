#include "gossipsim/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace gossipsim::proto {

std::string to_string(Mode mode) {
  return mode == Mode::baseline ? "baseline" : "enhanced";
}

Mode mode_from_string(const std::string& name) {
  if (name == "baseline") return Mode::baseline;
  if (name == "enhanced") return Mode::enhanced;
  throw std::invalid_argument("unknown protocol mode: " + name);
}

void ProtocolConfig::validate() const {
  if (n < 2) throw std::invalid_argument("protocol.n must be at least 2");
  if (fan_out < 1 || fan_out > n - 1) {
    throw std::invalid_argument("protocol.fan_out must lie in [1, n-1]");
  }
  if (digest_bytes < 1) throw std::invalid_argument("protocol.digest_bytes must be positive");
  if (t_push_ms < 0 || t_pull_ms < 0 || t_recovery_ms < 0 || advert_period_ms < 0) {
    throw std::invalid_argument("protocol timers must be nonnegative");
  }
  if (mode == Mode::baseline) {
    if (ttl != 0 || ttl_direct != 0) {
      throw std::invalid_argument("ttl settings are only meaningful in enhanced mode");
    }
    if (fan_in < 1 || fan_in > n - 1) {
      throw std::invalid_argument("protocol.fan_in must lie in [1, n-1]");
    }
    if (push_buffer_cap < 1) {
      throw std::invalid_argument("protocol.push_buffer_cap must be at least 1");
    }
    if (pull_window < 1) throw std::invalid_argument("protocol.pull_window must be at least 1");
  } else {
    if (ttl < 1) throw std::invalid_argument("enhanced mode requires ttl >= 1");
    if (ttl_direct < 0 || ttl_direct > ttl) {
      throw std::invalid_argument("ttl_direct must lie in [0, ttl]");
    }
    if (fan_out_leader < 1 || fan_out_leader > n - 1) {
      throw std::invalid_argument("fan_out_leader must lie in [1, n-1]");
    }
    if (t_pull_ms != 0) {
      throw std::invalid_argument("enhanced mode runs without the pull component");
    }
  }
}

ProtocolConfig default_protocol_config(Mode mode) {
  ProtocolConfig cfg;
  cfg.mode = mode;
  if (mode == Mode::enhanced) {
    cfg.fan_out = 4;
    cfg.ttl = 9;
    cfg.ttl_direct = 2;
    cfg.t_push_ms = 0.0;
    cfg.t_pull_ms = 0.0;
  }
  return cfg;
}

GossipNetwork::GossipNetwork(sim::Engine& engine, sim::Network& network,
                             ProtocolConfig config)
    : engine_(engine), net_(network), cfg_(std::move(config)) {
  cfg_.validate();
  if (net_.n_peers() != cfg_.n) {
    throw std::invalid_argument("network peer count does not match protocol.n");
  }
  peers_.resize(cfg_.n);
  peer_rng_.reserve(cfg_.n);
  initial_gossiper_counts_.assign(cfg_.n, 0);
  for (int i = 0; i < cfg_.n; ++i) {
    peers_[i].id = i;
    peers_[i].known_heights.assign(cfg_.n, 0);
    peer_rng_.push_back(engine_.derived_rng(static_cast<std::uint64_t>(i)));
  }
}

void GossipNetwork::start() {
  for (int p = 0; p < cfg_.n; ++p) {
    auto& rng = peer_rng_[p];
    auto phase = [&rng](double period) {
      return std::uniform_real_distribution<double>(0.0, period)(rng);
    };
    if (cfg_.mode == Mode::baseline && cfg_.t_pull_ms > 0) {
      schedule_periodic(phase(cfg_.t_pull_ms), cfg_.t_pull_ms, [this, p]() { do_pull(p); });
    }
    if (cfg_.advert_period_ms > 0) {
      schedule_periodic(phase(cfg_.advert_period_ms), cfg_.advert_period_ms,
                        [this, p]() { do_advert(p); });
    }
    if (cfg_.t_recovery_ms > 0) {
      schedule_periodic(phase(cfg_.t_recovery_ms), cfg_.t_recovery_ms,
                        [this, p]() { do_recovery(p); });
    }
  }
}

void GossipNetwork::schedule_periodic(double phase_ms, double period_ms,
                                      std::function<void()> fn) {
  engine_.schedule_after(phase_ms, [this, period_ms, fn = std::move(fn)]() mutable {
    fn();
    schedule_periodic(period_ms, period_ms, std::move(fn));
  });
}

const BlockPtr& GossipNetwork::block(std::uint64_t seq) const {
  return blocks_by_seq_.at(seq - 1);
}

bool GossipNetwork::has_block(std::uint64_t seq) const {
  return seq >= 1 && seq <= blocks_by_seq_.size();
}

int GossipNetwork::fully_informed_peers() const {
  int count = 0;
  for (const auto& ps : peers_) {
    if (ps.height >= blocks_by_seq_.size()) ++count;
  }
  return count;
}

void GossipNetwork::orderer_deliver(const BlockPtr& block) {
  if (has_block(block->seq)) {
    std::fprintf(stderr, "warning: duplicate block seq %llu from orderer, ignored\n",
                 static_cast<unsigned long long>(block->seq));
    return;
  }
  if (block->seq != blocks_by_seq_.size() + 1) {
    throw std::invalid_argument("orderer must deliver consecutive sequence numbers");
  }
  blocks_by_seq_.push_back(block);
  stats_.blocks_delivered_by_orderer += 1;

  if (cfg_.mode == Mode::baseline) {
    handle_push_baseline(kLeader, PushBlock{block, 0});
    return;
  }
  store_payload(kLeader, block);
  auto targets = sample_peers(kLeader, cfg_.fan_out_leader, peer_rng_[kLeader]);
  for (sim::PeerId t : targets) {
    initial_gossiper_counts_[t] += 1;
    send_msg(kLeader, t, PushBlock{block, 0});
  }
}

void GossipNetwork::send_msg(sim::PeerId from, sim::PeerId to, GossipMessage msg) {
  std::visit(
      [this](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PushBlock>) stats_.push_payload_sends += 1;
        if constexpr (std::is_same_v<T, BlockDigest>) stats_.digest_sends += 1;
        if constexpr (std::is_same_v<T, DigestRequest>) stats_.digest_request_sends += 1;
        if constexpr (std::is_same_v<T, PullBlockResponse>) {
          stats_.pull_payload_blocks += m.blocks.size();
        }
        if constexpr (std::is_same_v<T, RecoveryResponse>) {
          stats_.recovery_payload_blocks += m.blocks.size();
        }
      },
      msg);
  stats_.messages_sent += 1;
  const std::size_t wire = wire_size(msg);
  const std::size_t payload = payload_size(msg);
  net_.send(from, to, wire, payload,
            [this, from, to, m = std::move(msg)]() { handle(to, from, m); });
}

void GossipNetwork::handle(sim::PeerId self, sim::PeerId from, const GossipMessage& msg) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PushBlock>) {
          if (cfg_.mode == Mode::baseline) {
            handle_push_baseline(self, m);
          } else {
            handle_push_enhanced(self, m);
          }
        } else if constexpr (std::is_same_v<T, BlockDigest>) {
          handle_digest(self, from, m);
        } else if constexpr (std::is_same_v<T, DigestRequest>) {
          handle_digest_request(self, from, m);
        } else if constexpr (std::is_same_v<T, PullDigestRequest>) {
          handle_pull_digest_request(self, from);
        } else if constexpr (std::is_same_v<T, PullDigestResponse>) {
          handle_pull_digest_response(self, from, m);
        } else if constexpr (std::is_same_v<T, PullBlockRequest>) {
          handle_pull_block_request(self, from, m);
        } else if constexpr (std::is_same_v<T, PullBlockResponse>) {
          for (const auto& b : m.blocks) {
            if (store_payload(self, b)) peers_[self].infected.insert(b->seq);
          }
        } else if constexpr (std::is_same_v<T, RecoveryRequest>) {
          handle_recovery_request(self, from, m);
        } else if constexpr (std::is_same_v<T, RecoveryResponse>) {
          for (const auto& b : m.blocks) {
            if (store_payload(self, b)) peers_[self].infected.insert(b->seq);
          }
        } else {
          static_assert(std::is_same_v<T, HeightAdvert>);
          handle_height_advert(self, from, m);
        }
      },
      msg);
}

bool GossipNetwork::store_payload(sim::PeerId self, const BlockPtr& block) {
  auto& ps = peers_[self];
  if (!ps.held.insert(block->seq).second) return false;
  while (ps.held.count(ps.height + 1)) ++ps.height;
  if (receipt_hook_) receipt_hook_(block->seq, self, engine_.now());
  ps.outstanding_requests.erase(block->seq);
  auto deferred = ps.deferred_forwards.find(block->seq);
  if (deferred != ps.deferred_forwards.end()) {
    std::vector<int> counters = std::move(deferred->second);
    ps.deferred_forwards.erase(deferred);
    for (int k : counters) forward_pair(self, block, k);
  }
  return true;
}

// --- baseline push -----------------------------------------------------------

void GossipNetwork::handle_push_baseline(sim::PeerId self, const PushBlock& msg) {
  auto& ps = peers_[self];
  const std::uint64_t seq = msg.block->seq;
  const bool first = !ps.infected.count(seq) && !ps.held.count(seq);
  store_payload(self, msg.block);
  if (!first) return;  // infect-and-die: store only, never push again
  ps.infected.insert(seq);
  ps.push_buffer.push_back(msg.block);
  if (static_cast<int>(ps.push_buffer.size()) >= cfg_.push_buffer_cap) {
    flush_push_buffer(self);
  } else if (!ps.flush_scheduled) {
    ps.flush_scheduled = true;
    engine_.schedule_after(cfg_.t_push_ms, [this, self]() { flush_push_buffer(self); });
  }
}

void GossipNetwork::flush_push_buffer(sim::PeerId self) {
  auto& ps = peers_[self];
  ps.flush_scheduled = false;
  if (ps.push_buffer.empty()) return;
  std::vector<BlockPtr> buffered;
  buffered.swap(ps.push_buffer);
  auto targets = sample_peers(self, cfg_.fan_out, peer_rng_[self]);
  for (const BlockPtr& b : buffered) {
    for (sim::PeerId t : targets) send_msg(self, t, PushBlock{b, 0});
  }
}

// --- enhanced push -----------------------------------------------------------

void GossipNetwork::handle_push_enhanced(sim::PeerId self, const PushBlock& msg) {
  auto& ps = peers_[self];
  const std::uint64_t seq = msg.block->seq;
  const bool new_pair = ps.seen_pairs.insert({seq, msg.counter}).second;
  store_payload(self, msg.block);
  if (new_pair && msg.counter + 1 <= cfg_.ttl) {
    forward_pair(self, msg.block, msg.counter + 1);
  }
}

void GossipNetwork::handle_digest(sim::PeerId self, sim::PeerId from,
                                  const BlockDigest& msg) {
  auto& ps = peers_[self];
  if (!ps.seen_pairs.insert({msg.seq, msg.counter}).second) return;
  if (ps.held.count(msg.seq)) {
    if (msg.counter + 1 <= cfg_.ttl) forward_pair(self, block(msg.seq), msg.counter + 1);
    return;
  }
  if (msg.counter + 1 <= cfg_.ttl) {
    ps.deferred_forwards[msg.seq].push_back(msg.counter + 1);
  }
  // One payload request in flight per block; digest senders always hold the
  // payload, so the response is guaranteed on a lossless network.
  if (ps.outstanding_requests.insert(msg.seq).second) {
    send_msg(self, from, DigestRequest{msg.seq, msg.counter});
  }
}

void GossipNetwork::handle_digest_request(sim::PeerId self, sim::PeerId from,
                                          const DigestRequest& msg) {
  if (!peers_[self].held.count(msg.seq)) return;  // nothing to serve
  send_msg(self, from, PushBlock{block(msg.seq), msg.counter});
}

void GossipNetwork::forward_pair(sim::PeerId self, const BlockPtr& block, int counter) {
  auto targets = sample_peers(self, cfg_.fan_out, peer_rng_[self]);
  if (counter <= cfg_.ttl_direct) {
    for (sim::PeerId t : targets) send_msg(self, t, PushBlock{block, counter});
  } else {
    for (sim::PeerId t : targets) {
      send_msg(self, t, BlockDigest{block->seq, counter,
                                    static_cast<std::size_t>(cfg_.digest_bytes)});
    }
  }
}

// --- pull ---------------------------------------------------------------------

void GossipNetwork::do_pull(sim::PeerId self) {
  auto contacts = sample_peers(self, cfg_.fan_in, peer_rng_[self]);
  for (sim::PeerId c : contacts) send_msg(self, c, PullDigestRequest{});
}

void GossipNetwork::handle_pull_digest_request(sim::PeerId self, sim::PeerId from) {
  const auto& held = peers_[self].held;
  PullDigestResponse resp;
  for (auto it = held.rbegin();
       it != held.rend() && static_cast<int>(resp.seqs.size()) < cfg_.pull_window; ++it) {
    resp.seqs.push_back(*it);
  }
  send_msg(self, from, std::move(resp));
}

void GossipNetwork::handle_pull_digest_response(sim::PeerId self, sim::PeerId from,
                                                const PullDigestResponse& msg) {
  PullBlockRequest req;
  for (std::uint64_t seq : msg.seqs) {
    if (!peers_[self].held.count(seq)) req.seqs.push_back(seq);
  }
  if (!req.seqs.empty()) send_msg(self, from, std::move(req));
}

void GossipNetwork::handle_pull_block_request(sim::PeerId self, sim::PeerId from,
                                              const PullBlockRequest& msg) {
  PullBlockResponse resp;
  for (std::uint64_t seq : msg.seqs) {
    if (peers_[self].held.count(seq)) resp.blocks.push_back(block(seq));
  }
  if (!resp.blocks.empty()) send_msg(self, from, std::move(resp));
}

// --- metadata and recovery ------------------------------------------------------

void GossipNetwork::do_advert(sim::PeerId self) {
  auto targets = sample_peers(self, cfg_.fan_out, peer_rng_[self]);
  for (sim::PeerId t : targets) send_msg(self, t, HeightAdvert{peers_[self].height});
}

void GossipNetwork::handle_height_advert(sim::PeerId self, sim::PeerId from,
                                         const HeightAdvert& msg) {
  auto& known = peers_[self].known_heights[from];
  known = std::max(known, msg.height);
}

void GossipNetwork::do_recovery(sim::PeerId self) {
  auto& ps = peers_[self];
  std::uint64_t max_height = 0;
  for (std::uint64_t h : ps.known_heights) max_height = std::max(max_height, h);
  if (max_height <= ps.height) return;
  std::vector<sim::PeerId> candidates;
  for (int p = 0; p < cfg_.n; ++p) {
    if (p != self && ps.known_heights[p] == max_height) candidates.push_back(p);
  }
  const auto pick = std::uniform_int_distribution<std::size_t>(
      0, candidates.size() - 1)(peer_rng_[self]);
  send_msg(self, candidates[pick], RecoveryRequest{ps.height + 1, max_height});
}

void GossipNetwork::handle_recovery_request(sim::PeerId self, sim::PeerId from,
                                            const RecoveryRequest& msg) {
  RecoveryResponse resp;
  for (std::uint64_t seq = msg.from_seq; seq <= msg.to_seq; ++seq) {
    if (!peers_[self].held.count(seq)) break;  // serve the consecutive prefix
    resp.blocks.push_back(block(seq));
  }
  if (!resp.blocks.empty()) send_msg(self, from, std::move(resp));
}

std::vector<sim::PeerId> GossipNetwork::sample_peers(sim::PeerId self, int count,
                                                     std::mt19937_64& rng) {
  // Uniform without replacement, excluding self.
  std::vector<sim::PeerId> pool;
  pool.reserve(cfg_.n - 1);
  for (int p = 0; p < cfg_.n; ++p) {
    if (p != self) pool.push_back(p);
  }
  count = std::min<int>(count, static_cast<int>(pool.size()));
  for (int i = 0; i < count; ++i) {
    const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace gossipsim::proto
