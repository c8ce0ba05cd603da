#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gossipsim/engine.hpp"

namespace gossipsim::ledger {

using Key = std::uint32_t;

struct Transaction {
  std::uint64_t id = 0;
  std::map<Key, std::uint64_t> read_set;  // key -> version observed at endorsement
  std::map<Key, std::int64_t> write_set;  // key -> new value

  bool operator==(const Transaction&) const = default;
};

struct VersionedValue {
  std::int64_t value = 0;
  std::uint64_t version = 0;

  bool operator==(const VersionedValue&) const = default;
};

// Key/value state materialized from the ledger; every applied write bumps the
// key version by exactly one.
class VersionedStore {
 public:
  VersionedStore() = default;
  explicit VersionedStore(int n_keys);

  const VersionedValue& get(Key key) const;
  void apply(Key key, std::int64_t value);
  std::int64_t sum_values() const;
  std::size_t size() const { return kv_.size(); }

  bool operator==(const VersionedStore&) const = default;

 private:
  std::map<Key, VersionedValue> kv_;
};

struct ValidationResult {
  std::vector<bool> valid;  // one flag per transaction, in order
  std::uint64_t conflicts = 0;
};

// Snapshot-read endorsement of an increment on one key.
Transaction endorse(std::uint64_t id, Key key, const VersionedStore& endorser_store);

// Earliest-writer-wins validation: a transaction is valid iff every read
// version matches the store; valid writes apply immediately, conflicted
// transactions apply nothing.
ValidationResult validate_transactions(const std::vector<Transaction>& txs,
                                       VersionedStore& store);

struct WorkloadIntent {
  double t_ms = 0.0;
  Key key = 0;
  std::uint64_t id = 0;

  bool operator==(const WorkloadIntent&) const = default;
};

// rounds permutations of n_keys increments, issued at a fixed cadence.
std::vector<WorkloadIntent> increment_workload(int n_keys, int rounds,
                                               double rate_tx_per_s, std::uint64_t seed);

// Orderer stub: buffers endorsed transactions and cuts a block when max_txs
// accumulate or timer_ms elapses after the first buffered transaction.
// Performs no validation. Never emits empty blocks.
class BlockProducer {
 public:
  using CutCallback = std::function<void(std::vector<Transaction>)>;

  BlockProducer(sim::Engine& engine, int max_txs, double timer_ms, CutCallback on_cut);

  void submit(Transaction tx);
  std::size_t pending() const { return buffer_.size(); }

 private:
  void cut();

  sim::Engine& engine_;
  int max_txs_;
  double timer_ms_;
  CutCallback on_cut_;
  std::vector<Transaction> buffer_;
  std::uint64_t timer_generation_ = 0;
};

// Per-peer validation pipeline: blocks validate strictly in ledger order, each
// occupying the peer for ms_per_tx * tx_count of virtual time before its
// writes become visible.
class PeerValidator {
 public:
  using AppliedCallback = std::function<void(std::uint64_t seq)>;

  PeerValidator(sim::Engine& engine, int n_keys, double ms_per_tx,
                AppliedCallback on_applied = {});

  void block_arrived(std::uint64_t seq, std::vector<Transaction> txs);

  const VersionedStore& store() const { return store_; }
  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t valid_transactions() const { return valid_txs_; }
  std::uint64_t validated_blocks() const { return next_seq_ - 1; }

 private:
  void maybe_start();

  sim::Engine& engine_;
  double ms_per_tx_;
  AppliedCallback on_applied_;
  VersionedStore store_;
  std::map<std::uint64_t, std::vector<Transaction>> pending_;
  std::uint64_t next_seq_ = 1;
  bool busy_ = false;
  std::uint64_t conflicts_ = 0;
  std::uint64_t valid_txs_ = 0;
};

}  // namespace gossipsim::ledger
