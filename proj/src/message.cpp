#include "gossipsim/message.hpp"

namespace gossipsim::proto {

namespace {

std::size_t blocks_bytes(const std::vector<BlockPtr>& blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b->size_bytes;
  return total;
}

}  // namespace

std::size_t wire_size(const GossipMessage& msg) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PushBlock>) {
          return kMsgHeaderBytes + m.block->size_bytes;
        } else if constexpr (std::is_same_v<T, BlockDigest>) {
          return m.digest_bytes;
        } else if constexpr (std::is_same_v<T, DigestRequest>) {
          return kMsgHeaderBytes;
        } else if constexpr (std::is_same_v<T, PullDigestRequest>) {
          return kMsgHeaderBytes;
        } else if constexpr (std::is_same_v<T, PullDigestResponse>) {
          return kMsgHeaderBytes + kSeqBytes * m.seqs.size();
        } else if constexpr (std::is_same_v<T, PullBlockRequest>) {
          return kMsgHeaderBytes + kSeqBytes * m.seqs.size();
        } else if constexpr (std::is_same_v<T, PullBlockResponse>) {
          return kMsgHeaderBytes + blocks_bytes(m.blocks);
        } else if constexpr (std::is_same_v<T, RecoveryRequest>) {
          return kMsgHeaderBytes + 2 * kSeqBytes;
        } else if constexpr (std::is_same_v<T, RecoveryResponse>) {
          return kMsgHeaderBytes + blocks_bytes(m.blocks);
        } else {
          static_assert(std::is_same_v<T, HeightAdvert>);
          return kHeightAdvertBytes;
        }
      },
      msg);
}

std::size_t payload_size(const GossipMessage& msg) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PushBlock>) {
          return m.block->size_bytes;
        } else if constexpr (std::is_same_v<T, PullBlockResponse>) {
          return blocks_bytes(m.blocks);
        } else if constexpr (std::is_same_v<T, RecoveryResponse>) {
          return blocks_bytes(m.blocks);
        } else {
          return 0;
        }
      },
      msg);
}

}  // namespace gossipsim::proto
