#include <algorithm>

#include "poa/harness.hpp"

namespace poa {

Metrics count_victims(std::span<const BlockPtr> confirmed, const AttackConfig& attack, const FrontrunJudge& judge) {
  Metrics m;
  const bool attacking = attack.active();
  for (std::size_t i = 1; i < confirmed.size(); ++i) {
    const Block& b = *confirmed[i];
    ++m.canonical_blocks;
    const NodeId sealer = b.sealer();
    if (sealer.valid()) {
      if (m.per_sealer.size() <= sealer.value) m.per_sealer.resize(sealer.value + 1, 0);
      ++m.per_sealer[sealer.value];
    }
    const bool by_attacker = attacking && sealer == attack.attacker;
    if (by_attacker) ++m.attacker_sealed_blocks;

    bool fronted = false;
    for (const auto& tx : b.txs()) {
      switch (tx.kind) {
        case TxKind::AttackerFront:
          fronted = true;
          ++m.attacker_txs;
          break;
        case TxKind::AttackerBack: ++m.attacker_txs; break;
        case TxKind::User:
          ++m.confirmed_txs;
          if (fronted) ++m.victim_txs;
          break;
      }
    }
    if (by_attacker && attack.type2 && b.header().difficulty == 1 && (!judge || judge(b, confirmed))) ++m.victim_blocks;
  }
  m.rate_tx = m.confirmed_txs == 0 ? 0.0 : static_cast<double>(m.victim_txs) / static_cast<double>(m.confirmed_txs);
  m.rate_block =
      m.canonical_blocks == 0 ? 0.0 : static_cast<double>(m.victim_blocks) / static_cast<double>(m.canonical_blocks);
  return m;
}

}  // namespace poa
