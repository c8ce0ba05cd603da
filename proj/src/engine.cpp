#include "gossipsim/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace gossipsim::sim {

void Engine::schedule_at(double t_ms, std::function<void()> fn) {
  if (t_ms < now_) {
    throw std::logic_error("Engine::schedule_at: event scheduled in the past");
  }
  queue_.push(Event{t_ms, next_seq_++, std::move(fn)});
}

SimulationSummary Engine::run_until(double t_end_ms) {
  while (!queue_.empty() && queue_.top().t <= t_end_ms) {
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.t;
    ++events_executed_;
    ev.fn();
  }
  if (std::isfinite(t_end_ms) && t_end_ms > now_) now_ = t_end_ms;
  return SimulationSummary{now_, events_executed_};
}

void LatencyModel::validate() const {
  if (base_ms < 0 || per_byte_us < 0 || jitter_ms < 0) {
    throw std::domain_error("LatencyModel: all delay components must be nonnegative");
  }
}

Network::Network(Engine& engine, const LatencyModel& latency, int n_peers,
                 double drop_probability)
    : engine_(engine), latency_(latency), drop_probability_(drop_probability) {
  latency_.validate();
  if (n_peers < 1) throw std::domain_error("Network: need at least one peer");
  if (drop_probability_ < 0.0 || drop_probability_ >= 1.0) {
    throw std::domain_error("Network: drop_probability must lie in [0, 1)");
  }
  counters_.resize(n_peers);
}

double Network::delay_for(std::size_t wire_bytes) {
  double delay = latency_.base_ms + latency_.per_byte_us * static_cast<double>(wire_bytes) / 1000.0;
  if (latency_.jitter_ms > 0.0) {
    delay += std::uniform_real_distribution<double>(0.0, latency_.jitter_ms)(engine_.rng());
  }
  return delay;
}

void Network::send(PeerId from, PeerId to, std::size_t wire_bytes, std::size_t payload_bytes,
                   std::function<void()> on_deliver) {
  counters_.at(from);  // bounds check
  counters_.at(to);
  const double delay = delay_for(wire_bytes);
  if (drop_probability_ > 0.0 &&
      std::uniform_real_distribution<double>(0.0, 1.0)(engine_.rng()) < drop_probability_) {
    return;  // dropped messages are never charged
  }
  engine_.schedule_after(delay, [this, from, to, wire_bytes, payload_bytes,
                                 fn = std::move(on_deliver)]() {
    auto& src = counters_[from];
    auto& dst = counters_[to];
    src.bytes_sent += wire_bytes;
    src.payload_bytes_sent += payload_bytes;
    src.messages_sent += 1;
    dst.bytes_received += wire_bytes;
    dst.payload_bytes_received += payload_bytes;
    if (sink_) sink_(engine_.now(), from, to, wire_bytes, payload_bytes);
    fn();
  });
}

std::uint64_t Network::total_bytes_sent() const {
  std::uint64_t total = 0;
  for (const auto& c : counters_) total += c.bytes_sent;
  return total;
}

std::uint64_t Network::total_bytes_received() const {
  std::uint64_t total = 0;
  for (const auto& c : counters_) total += c.bytes_received;
  return total;
}

std::uint64_t Network::total_payload_bytes_sent() const {
  std::uint64_t total = 0;
  for (const auto& c : counters_) total += c.payload_bytes_sent;
  return total;
}

}  // namespace gossipsim::sim
