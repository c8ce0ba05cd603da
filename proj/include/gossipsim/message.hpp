#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "gossipsim/ledger.hpp"

namespace gossipsim::proto {

constexpr std::size_t kMsgHeaderBytes = 32;
constexpr std::size_t kHeightAdvertBytes = 32;
constexpr std::size_t kSeqBytes = 8;

struct Block {
  std::uint64_t seq = 0;
  std::size_t size_bytes = 0;
  std::vector<ledger::Transaction> txs;
};

using BlockPtr = std::shared_ptr<const Block>;

struct PushBlock {
  BlockPtr block;
  int counter = 0;
};

struct BlockDigest {
  std::uint64_t seq = 0;
  int counter = 0;
  std::size_t digest_bytes = 64;
};

struct DigestRequest {
  std::uint64_t seq = 0;
  int counter = 0;
};

struct PullDigestRequest {};

struct PullDigestResponse {
  std::vector<std::uint64_t> seqs;
};

struct PullBlockRequest {
  std::vector<std::uint64_t> seqs;
};

struct PullBlockResponse {
  std::vector<BlockPtr> blocks;
};

struct RecoveryRequest {
  std::uint64_t from_seq = 0;
  std::uint64_t to_seq = 0;
};

struct RecoveryResponse {
  std::vector<BlockPtr> blocks;
};

struct HeightAdvert {
  std::uint64_t height = 0;
};

using GossipMessage =
    std::variant<PushBlock, BlockDigest, DigestRequest, PullDigestRequest,
                 PullDigestResponse, PullBlockRequest, PullBlockResponse,
                 RecoveryRequest, RecoveryResponse, HeightAdvert>;

std::size_t wire_size(const GossipMessage& msg);

// Bytes of full block payload carried by the message (zero for digests,
// requests and metadata).
std::size_t payload_size(const GossipMessage& msg);

}  // namespace gossipsim::proto
