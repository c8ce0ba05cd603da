#include "gossipsim/ledger.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gossipsim::ledger {

VersionedStore::VersionedStore(int n_keys) {
  for (int k = 0; k < n_keys; ++k) kv_[static_cast<Key>(k)] = VersionedValue{};
}

const VersionedValue& VersionedStore::get(Key key) const {
  static const VersionedValue kZero{};
  auto it = kv_.find(key);
  return it == kv_.end() ? kZero : it->second;
}

void VersionedStore::apply(Key key, std::int64_t value) {
  auto& entry = kv_[key];
  entry.value = value;
  entry.version += 1;
}

std::int64_t VersionedStore::sum_values() const {
  std::int64_t sum = 0;
  for (const auto& [key, vv] : kv_) sum += vv.value;
  return sum;
}

Transaction endorse(std::uint64_t id, Key key, const VersionedStore& endorser_store) {
  const VersionedValue& current = endorser_store.get(key);
  Transaction tx;
  tx.id = id;
  tx.read_set[key] = current.version;
  tx.write_set[key] = current.value + 1;
  return tx;
}

ValidationResult validate_transactions(const std::vector<Transaction>& txs,
                                       VersionedStore& store) {
  ValidationResult result;
  result.valid.reserve(txs.size());
  for (const Transaction& tx : txs) {
    bool ok = true;
    for (const auto& [key, version] : tx.read_set) {
      if (store.get(key).version != version) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& [key, value] : tx.write_set) store.apply(key, value);
    } else {
      result.conflicts += 1;
    }
    result.valid.push_back(ok);
  }
  return result;
}

std::vector<WorkloadIntent> increment_workload(int n_keys, int rounds,
                                               double rate_tx_per_s, std::uint64_t seed) {
  if (n_keys < 1 || rounds < 1) throw std::domain_error("increment_workload: empty workload");
  if (rate_tx_per_s <= 0) throw std::domain_error("increment_workload: rate must be positive");
  std::mt19937_64 rng(sim::splitmix64(seed));
  const double interval_ms = 1000.0 / rate_tx_per_s;
  std::vector<Key> keys(n_keys);
  std::iota(keys.begin(), keys.end(), 0u);
  std::vector<WorkloadIntent> intents;
  intents.reserve(static_cast<std::size_t>(n_keys) * rounds);
  std::uint64_t id = 0;
  for (int r = 0; r < rounds; ++r) {
    std::shuffle(keys.begin(), keys.end(), rng);
    for (Key key : keys) {
      intents.push_back(WorkloadIntent{static_cast<double>(id) * interval_ms, key, id});
      ++id;
    }
  }
  return intents;
}

BlockProducer::BlockProducer(sim::Engine& engine, int max_txs, double timer_ms,
                             CutCallback on_cut)
    : engine_(engine), max_txs_(max_txs), timer_ms_(timer_ms), on_cut_(std::move(on_cut)) {
  if (max_txs_ < 1) throw std::domain_error("BlockProducer: max_txs must be at least 1");
  if (timer_ms_ <= 0) throw std::domain_error("BlockProducer: timer must be positive");
}

void BlockProducer::submit(Transaction tx) {
  buffer_.push_back(std::move(tx));
  if (static_cast<int>(buffer_.size()) >= max_txs_) {
    cut();
    return;
  }
  if (buffer_.size() == 1) {
    const std::uint64_t generation = timer_generation_;
    engine_.schedule_after(timer_ms_, [this, generation]() {
      if (generation == timer_generation_ && !buffer_.empty()) cut();
    });
  }
}

void BlockProducer::cut() {
  ++timer_generation_;
  std::vector<Transaction> txs;
  txs.swap(buffer_);
  on_cut_(std::move(txs));
}

PeerValidator::PeerValidator(sim::Engine& engine, int n_keys, double ms_per_tx,
                             AppliedCallback on_applied)
    : engine_(engine),
      ms_per_tx_(ms_per_tx),
      on_applied_(std::move(on_applied)),
      store_(n_keys) {}

void PeerValidator::block_arrived(std::uint64_t seq, std::vector<Transaction> txs) {
  if (seq < next_seq_ || pending_.count(seq)) return;  // already validated or queued
  pending_.emplace(seq, std::move(txs));
  maybe_start();
}

void PeerValidator::maybe_start() {
  if (busy_) return;
  auto it = pending_.find(next_seq_);
  if (it == pending_.end()) return;
  busy_ = true;
  const double busy_ms = ms_per_tx_ * static_cast<double>(it->second.size());
  engine_.schedule_after(busy_ms, [this]() {
    auto done = pending_.find(next_seq_);
    ValidationResult result = validate_transactions(done->second, store_);
    conflicts_ += result.conflicts;
    valid_txs_ += done->second.size() - result.conflicts;
    pending_.erase(done);
    const std::uint64_t applied = next_seq_;
    ++next_seq_;
    busy_ = false;
    if (on_applied_) on_applied_(applied);
    maybe_start();
  });
}

}  // namespace gossipsim::ledger
