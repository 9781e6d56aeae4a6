#include "poa/types.hpp"

#include <cstdio>

#include "poa/digest.hpp"

namespace poa {

std::string BlockId::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

const char* to_string(TxKind kind) {
  switch (kind) {
    case TxKind::User:
      return "user";
    case TxKind::AttackerFront:
      return "attacker-front";
    case TxKind::AttackerBack:
      return "attacker-back";
  }
  return "?";
}

BlockId compute_block_id(const BlockHeader& header, const std::vector<Transaction>& txs) {
  Sha256 h;
  h.update("poa-block");
  h.update_u64(header.number).update_u64(header.parent.value).update_u32(header.sealer.value);
  h.update_u32(header.difficulty).update_u64(static_cast<std::uint64_t>(header.timestamp));
  if (header.hardware_trace) h.update("trace").update_u64(*header.hardware_trace);
  if (header.vrf) h.update("vrf").update_u32(header.vrf->attempt).update(header.vrf->output).update(header.vrf->proof);
  h.update_u64(txs.size());
  for (const auto& tx : txs) h.update_u64(tx.id.value);
  return BlockId{digest_prefix_u64(h.finish())};
}

Block::Block(BlockHeader header, std::vector<Transaction> txs)
    : header_(std::move(header)), txs_(std::move(txs)), id_(compute_block_id(header_, txs_)) {}

BlockPtr make_block(BlockHeader header, std::vector<Transaction> txs) {
  return std::make_shared<const Block>(std::move(header), std::move(txs));
}

BlockPtr make_genesis() {
  BlockHeader h;
  h.number = 0;
  h.parent = BlockId{0};
  h.sealer = NodeId::none();
  h.difficulty = 0;
  h.timestamp = 0;
  return make_block(h, {});
}

}  // namespace poa
