#include "gossipsim/experiment.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "gossipsim/ledger.hpp"

namespace gossipsim::experiment {

namespace {

std::uint64_t run_seed_for(std::uint64_t base_seed, std::uint64_t run_index) {
  return sim::splitmix64(base_seed ^ sim::splitmix64(0x9d5cull + run_index));
}

}  // namespace

DisseminationResult run_dissemination(const config::ExperimentConfig& cfg) {
  cfg.validate();
  sim::Engine engine(cfg.network.seed);
  sim::Network network(engine, cfg.network.latency, cfg.protocol.n,
                       cfg.network.drop_probability);
  proto::GossipNetwork gossip(engine, network, cfg.protocol);
  metrics::DisseminationTrace trace(cfg.protocol.n);

  network.set_byte_sink([&trace](double t, sim::PeerId from, sim::PeerId to,
                                 std::size_t wire, std::size_t payload) {
    trace.record_bytes(t, from, true, wire, payload);
    trace.record_bytes(t, to, false, wire, payload);
  });
  gossip.set_receipt_hook([&trace](std::uint64_t seq, sim::PeerId peer, double t) {
    if (peer == proto::GossipNetwork::kLeader) trace.begin_block(seq, t);
    trace.record_receipt(seq, peer, t);
  });

  gossip.start();
  for (int i = 0; i < cfg.workload.blocks; ++i) {
    const auto seq = static_cast<std::uint64_t>(i) + 1;
    const double t = static_cast<double>(i) * cfg.workload.block_interval_ms;
    engine.schedule_at(t, [&gossip, seq, &cfg]() {
      auto block = std::make_shared<proto::Block>();
      block->seq = seq;
      block->size_bytes = cfg.workload.block_bytes;
      gossip.orderer_deliver(block);
    });
  }
  const double t_end = static_cast<double>(cfg.workload.blocks) * cfg.workload.block_interval_ms +
                       cfg.workload.drain_ms;
  engine.run_until(t_end);

  DisseminationResult result{std::move(trace), {}, {}, gossip.stats(),
                             static_cast<std::uint64_t>(cfg.workload.blocks)};
  result.latency = metrics::latency_cdfs(result.trace);
  result.bandwidth = metrics::bandwidth_series(result.trace);
  result.undelivered_cells = result.trace.undelivered_cells();
  for (const auto& bt : result.trace.blocks()) {
    for (double t : bt.recv_ms) {
      if (std::isnan(t)) {
        result.undelivered_seqs.push_back(bt.seq);
        break;
      }
    }
  }
  return result;
}

ConflictRun run_conflict_once(const config::ExperimentConfig& cfg, proto::Mode mode,
                              double block_period_ms, std::uint64_t run_index) {
  cfg.validate();
  const std::uint64_t run_seed = run_seed_for(cfg.network.seed, run_index);

  proto::ProtocolConfig protocol = proto::default_protocol_config(mode);
  protocol.n = cfg.protocol.n;

  sim::Engine engine(run_seed);
  sim::Network network(engine, cfg.network.latency, protocol.n,
                       cfg.network.drop_probability);
  proto::GossipNetwork gossip(engine, network, protocol);

  const int n_keys = cfg.workload.n_keys;
  std::vector<std::unique_ptr<ledger::PeerValidator>> validators;
  validators.reserve(protocol.n);
  for (int p = 0; p < protocol.n; ++p) {
    validators.push_back(std::make_unique<ledger::PeerValidator>(
        engine, n_keys, cfg.workload.validation_ms_per_tx));
  }
  gossip.set_receipt_hook([&](std::uint64_t seq, sim::PeerId peer, double) {
    validators[peer]->block_arrived(seq, gossip.block(seq)->txs);
  });

  // Single endorser colocated with a random non-leader peer.
  std::mt19937_64 setup_rng(sim::splitmix64(run_seed ^ 0xE0D0));
  const sim::PeerId endorser =
      1 + static_cast<sim::PeerId>(setup_rng() % (protocol.n - 1));

  std::uint64_t blocks_cut = 0;
  std::uint64_t txs_in_blocks = 0;
  ledger::BlockProducer producer(
      engine, cfg.workload.max_txs, block_period_ms,
      [&](std::vector<ledger::Transaction> txs) {
        auto block = std::make_shared<proto::Block>();
        block->seq = ++blocks_cut;
        block->size_bytes = proto::kMsgHeaderBytes +
                            txs.size() * static_cast<std::size_t>(cfg.workload.tx_bytes);
        txs_in_blocks += txs.size();
        block->txs = std::move(txs);
        gossip.orderer_deliver(block);
      });

  const auto intents = ledger::increment_workload(
      n_keys, cfg.workload.rounds, cfg.workload.rate_tx_per_s,
      sim::splitmix64(run_seed ^ 0x3A7B));
  gossip.start();
  for (const auto& intent : intents) {
    engine.schedule_at(intent.t_ms, [&, intent]() {
      ledger::Transaction tx =
          ledger::endorse(intent.id, intent.key, validators[endorser]->store());
      engine.schedule_after(cfg.workload.ordering_delay_ms,
                            [&producer, tx = std::move(tx)]() mutable {
                              producer.submit(std::move(tx));
                            });
    });
  }

  double t_end = intents.back().t_ms + block_period_ms + cfg.workload.drain_ms;
  engine.run_until(t_end);
  // Recovery guarantees eventual delivery; allow a bounded extension in case
  // the endorser is still catching up at the nominal end.
  for (int extra = 0; extra < 30 && validators[endorser]->validated_blocks() < blocks_cut;
       ++extra) {
    t_end += 10000.0;
    engine.run_until(t_end);
  }
  if (validators[endorser]->validated_blocks() < blocks_cut) {
    throw std::runtime_error("conflict run did not quiesce: endorser is missing blocks");
  }

  ConflictRun run;
  run.conflicts = validators[endorser]->conflicts();
  run.blocks = blocks_cut;
  run.avg_txs_per_block =
      blocks_cut == 0 ? 0.0 : static_cast<double>(txs_in_blocks) / static_cast<double>(blocks_cut);

  const std::int64_t total_txs = static_cast<std::int64_t>(intents.size());
  const std::int64_t applied = validators[endorser]->store().sum_values();
  if (total_txs - applied != static_cast<std::int64_t>(run.conflicts)) {
    throw std::logic_error("conflict accounting mismatch: flags vs final counter sum");
  }
  return run;
}

std::vector<ConflictCell> run_conflict_experiment(const config::ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ConflictCell> cells;
  for (double period : cfg.workload.conflict_block_periods_ms) {
    ConflictCell cell;
    cell.block_period_ms = period;
    double baseline_sum = 0.0;
    double enhanced_sum = 0.0;
    for (int run = 0; run < cfg.workload.conflict_runs; ++run) {
      ConflictRun b = run_conflict_once(cfg, proto::Mode::baseline, period, run);
      ConflictRun e = run_conflict_once(cfg, proto::Mode::enhanced, period, run);
      baseline_sum += static_cast<double>(b.conflicts);
      enhanced_sum += static_cast<double>(e.conflicts);
      cell.baseline_runs.push_back(b);
      cell.enhanced_runs.push_back(e);
    }
    cell.baseline_mean = baseline_sum / cfg.workload.conflict_runs;
    cell.enhanced_mean = enhanced_sum / cfg.workload.conflict_runs;
    cell.reduction =
        cell.baseline_mean == 0.0 ? 0.0 : 1.0 - cell.enhanced_mean / cell.baseline_mean;
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace gossipsim::experiment
