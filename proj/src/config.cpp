#include "gossipsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gossipsim::config {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument("unknown config key \"" + section + key + "\"");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_protocol(const json& obj, proto::ProtocolConfig& cfg) {
  reject_unknown_keys(obj,
                      {"mode", "n", "fan_out", "fan_out_leader", "fan_in", "t_push_ms",
                       "t_pull_ms", "t_recovery_ms", "advert_period_ms", "ttl",
                       "ttl_direct", "digest_bytes", "push_buffer_cap", "pull_window"},
                      "protocol.");
  if (obj.contains("mode")) {
    cfg = proto::default_protocol_config(proto::mode_from_string(obj.at("mode").get<std::string>()));
  }
  read(obj, "n", cfg.n);
  read(obj, "fan_out", cfg.fan_out);
  read(obj, "fan_out_leader", cfg.fan_out_leader);
  read(obj, "fan_in", cfg.fan_in);
  read(obj, "t_push_ms", cfg.t_push_ms);
  read(obj, "t_pull_ms", cfg.t_pull_ms);
  read(obj, "t_recovery_ms", cfg.t_recovery_ms);
  read(obj, "advert_period_ms", cfg.advert_period_ms);
  read(obj, "ttl", cfg.ttl);
  read(obj, "ttl_direct", cfg.ttl_direct);
  read(obj, "digest_bytes", cfg.digest_bytes);
  read(obj, "push_buffer_cap", cfg.push_buffer_cap);
  read(obj, "pull_window", cfg.pull_window);
}

void parse_network(const json& obj, NetworkConfig& cfg) {
  reject_unknown_keys(obj, {"latency", "drop_probability", "seed"}, "network.");
  if (obj.contains("latency")) {
    const json& lat = obj.at("latency");
    reject_unknown_keys(lat, {"base_ms", "per_byte_us", "jitter_ms"}, "network.latency.");
    read(lat, "base_ms", cfg.latency.base_ms);
    read(lat, "per_byte_us", cfg.latency.per_byte_us);
    read(lat, "jitter_ms", cfg.latency.jitter_ms);
  }
  read(obj, "drop_probability", cfg.drop_probability);
  read(obj, "seed", cfg.seed);
}

void parse_workload(const json& obj, WorkloadConfig& cfg) {
  reject_unknown_keys(obj,
                      {"blocks", "block_bytes", "block_interval_ms", "drain_ms", "n_keys",
                       "rounds", "rate_tx_per_s", "max_txs", "block_timer_ms",
                       "validation_ms_per_tx", "ordering_delay_ms", "tx_bytes",
                       "conflict_block_periods_ms", "conflict_runs"},
                      "workload.");
  read(obj, "blocks", cfg.blocks);
  read(obj, "block_bytes", cfg.block_bytes);
  read(obj, "block_interval_ms", cfg.block_interval_ms);
  read(obj, "drain_ms", cfg.drain_ms);
  read(obj, "n_keys", cfg.n_keys);
  read(obj, "rounds", cfg.rounds);
  read(obj, "rate_tx_per_s", cfg.rate_tx_per_s);
  read(obj, "max_txs", cfg.max_txs);
  read(obj, "block_timer_ms", cfg.block_timer_ms);
  read(obj, "validation_ms_per_tx", cfg.validation_ms_per_tx);
  read(obj, "ordering_delay_ms", cfg.ordering_delay_ms);
  read(obj, "tx_bytes", cfg.tx_bytes);
  read(obj, "conflict_block_periods_ms", cfg.conflict_block_periods_ms);
  read(obj, "conflict_runs", cfg.conflict_runs);
}

}  // namespace

void ExperimentConfig::validate() const {
  protocol.validate();
  network.latency.validate();
  if (network.drop_probability < 0.0 || network.drop_probability >= 1.0) {
    throw std::invalid_argument("network.drop_probability must lie in [0, 1)");
  }
  if (workload.blocks < 1) throw std::invalid_argument("workload.blocks must be positive");
  if (workload.block_bytes < 1) throw std::invalid_argument("workload.block_bytes must be positive");
  if (workload.block_interval_ms <= 0) {
    throw std::invalid_argument("workload.block_interval_ms must be positive");
  }
  if (workload.n_keys < 1 || workload.rounds < 1) {
    throw std::invalid_argument("workload key/round counts must be positive");
  }
  if (workload.rate_tx_per_s <= 0) {
    throw std::invalid_argument("workload.rate_tx_per_s must be positive");
  }
  if (workload.max_txs < 1) throw std::invalid_argument("workload.max_txs must be positive");
  if (workload.block_timer_ms <= 0) {
    throw std::invalid_argument("workload.block_timer_ms must be positive");
  }
  if (workload.validation_ms_per_tx < 0 || workload.ordering_delay_ms < 0) {
    throw std::invalid_argument("workload delays must be nonnegative");
  }
  if (workload.tx_bytes < 1) throw std::invalid_argument("workload.tx_bytes must be positive");
  if (workload.conflict_block_periods_ms.empty()) {
    throw std::invalid_argument("workload.conflict_block_periods_ms must be nonempty");
  }
  if (workload.conflict_runs < 1) {
    throw std::invalid_argument("workload.conflict_runs must be positive");
  }
  if (output.dir.empty()) throw std::invalid_argument("output.dir must be nonempty");
}

ExperimentConfig default_config(proto::Mode mode) {
  ExperimentConfig cfg;
  cfg.protocol = proto::default_protocol_config(mode);
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config root must be a JSON object");
  reject_unknown_keys(doc, {"protocol", "network", "workload", "output"}, "");

  ExperimentConfig cfg;
  if (doc.contains("protocol")) parse_protocol(doc.at("protocol"), cfg.protocol);
  if (doc.contains("network")) parse_network(doc.at("network"), cfg.network);
  if (doc.contains("workload")) parse_workload(doc.at("workload"), cfg.workload);
  if (doc.contains("output")) {
    reject_unknown_keys(doc.at("output"), {"dir"}, "output.");
    read(doc.at("output"), "dir", cfg.output.dir);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["protocol"] = {
      {"mode", proto::to_string(cfg.protocol.mode)},
      {"n", cfg.protocol.n},
      {"fan_out", cfg.protocol.fan_out},
      {"fan_out_leader", cfg.protocol.fan_out_leader},
      {"fan_in", cfg.protocol.fan_in},
      {"t_push_ms", cfg.protocol.t_push_ms},
      {"t_pull_ms", cfg.protocol.t_pull_ms},
      {"t_recovery_ms", cfg.protocol.t_recovery_ms},
      {"advert_period_ms", cfg.protocol.advert_period_ms},
      {"ttl", cfg.protocol.ttl},
      {"ttl_direct", cfg.protocol.ttl_direct},
      {"digest_bytes", cfg.protocol.digest_bytes},
      {"push_buffer_cap", cfg.protocol.push_buffer_cap},
      {"pull_window", cfg.protocol.pull_window},
  };
  j["network"] = {
      {"latency",
       {{"base_ms", cfg.network.latency.base_ms},
        {"per_byte_us", cfg.network.latency.per_byte_us},
        {"jitter_ms", cfg.network.latency.jitter_ms}}},
      {"drop_probability", cfg.network.drop_probability},
      {"seed", cfg.network.seed},
  };
  j["workload"] = {
      {"blocks", cfg.workload.blocks},
      {"block_bytes", cfg.workload.block_bytes},
      {"block_interval_ms", cfg.workload.block_interval_ms},
      {"drain_ms", cfg.workload.drain_ms},
      {"n_keys", cfg.workload.n_keys},
      {"rounds", cfg.workload.rounds},
      {"rate_tx_per_s", cfg.workload.rate_tx_per_s},
      {"max_txs", cfg.workload.max_txs},
      {"block_timer_ms", cfg.workload.block_timer_ms},
      {"validation_ms_per_tx", cfg.workload.validation_ms_per_tx},
      {"ordering_delay_ms", cfg.workload.ordering_delay_ms},
      {"tx_bytes", cfg.workload.tx_bytes},
      {"conflict_block_periods_ms", cfg.workload.conflict_block_periods_ms},
      {"conflict_runs", cfg.workload.conflict_runs},
  };
  j["output"] = {{"dir", cfg.output.dir}};
  return j.dump(2);
}

}  // namespace gossipsim::config
