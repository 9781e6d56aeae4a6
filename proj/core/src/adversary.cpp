#include "poa/adversary.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace poa {

const char* to_string(Type1Mode mode) {
  switch (mode) {
    case Type1Mode::Off: return "off";
    case Type1Mode::Displacement: return "displacement";
    case Type1Mode::Insertion: return "insertion";
  }
  return "?";
}

Transaction AttackerTxFactory::make(TxKind kind, const Transaction& victim, Millis now) {
  Transaction tx;
  tx.id = ids_->next();
  tx.sender = sealer_account(attacker_);
  tx.nonce = next_nonce_++;
  tx.gas_price = victim.gas_price + 1;
  tx.gas_limit = victim.gas_limit;
  tx.arrival_time = now;
  tx.kind = kind;
  return tx;
}

TargetMask select_targets(std::span<const Transaction> honest, const TargetRule& rule) {
  TargetMask out(honest.size(), 0);
  std::uint64_t threshold = rule.threshold;
  if (rule.kind == TargetRule::Kind::AboveMedian) {
    std::vector<std::uint64_t> prices;
    for (const auto& tx : honest)
      if (tx.kind == TxKind::User) prices.push_back(tx.gas_price);
    if (prices.empty()) return out;
    const auto mid = prices.begin() + static_cast<std::ptrdiff_t>((prices.size() - 1) / 2);
    std::nth_element(prices.begin(), mid, prices.end());
    threshold = *mid;
  }
  for (std::size_t i = 0; i < honest.size(); ++i) {
    if (honest[i].kind != TxKind::User) continue;
    out[i] = rule.kind == TargetRule::Kind::All || honest[i].gas_price > threshold ? 1 : 0;
  }
  return out;
}

std::vector<Transaction> attack_order_displacement(std::span<const Transaction> honest,
                                                   std::span<const std::uint8_t> targets, AttackerTxFactory& factory,
                                                   Millis now) {
  std::vector<Transaction> out;
  out.reserve(honest.size() * 2);
  for (std::size_t i = 0; i < honest.size(); ++i) {
    if (i < targets.size() && targets[i] != 0) out.push_back(factory.make(TxKind::AttackerFront, honest[i], now));
    out.push_back(honest[i]);
  }
  return out;
}

std::vector<Transaction> attack_order_insertion(std::span<const Transaction> honest, std::span<const std::uint8_t> targets,
                                                AttackerTxFactory& factory, Millis now) {
  std::vector<Transaction> out;
  out.reserve(honest.size() * 3);
  for (std::size_t i = 0; i < honest.size(); ++i) {
    const bool hit = i < targets.size() && targets[i] != 0;
    if (hit) out.push_back(factory.make(TxKind::AttackerFront, honest[i], now));
    out.push_back(honest[i]);
    if (hit) out.push_back(factory.make(TxKind::AttackerBack, honest[i], now));
  }
  return out;
}

std::vector<Transaction> attack_arbitrary_reorder(std::span<const Transaction> honest,
                                                  std::span<const std::size_t> permutation, bool interleave,
                                                  AttackerTxFactory& factory, Millis now) {
  if (permutation.size() != honest.size()) throw std::invalid_argument("reorder: permutation size mismatch");
  std::vector<bool> seen(honest.size(), false);
  for (std::size_t p : permutation) {
    if (p >= honest.size() || seen[p]) throw std::invalid_argument("reorder: not a permutation");
    seen[p] = true;
  }
  std::vector<Transaction> out;
  out.reserve(honest.size() * 2);
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (interleave && i > 0) out.push_back(factory.make(TxKind::AttackerFront, honest[permutation[i]], now));
    out.push_back(honest[permutation[i]]);
  }
  return out;
}

std::vector<Transaction> attack_arbitrary_reorder(std::span<const Transaction> honest, Rng& rng,
                                                  AttackerTxFactory& factory, Millis now) {
  std::vector<std::size_t> perm(honest.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return attack_arbitrary_reorder(honest, perm, true, factory, now);
}

std::vector<Transaction> attack_order_displacement(const Mempool& pool, const AttackConfig& cfg,
                                                   AttackerTxFactory& factory, Millis now) {
  const auto honest = pool.honest_order();
  return attack_order_displacement(honest, select_targets(honest, cfg.target), factory, now);
}

std::vector<Transaction> attack_order_insertion(const Mempool& pool, const AttackConfig& cfg,
                                                AttackerTxFactory& factory, Millis now) {
  const auto honest = pool.honest_order();
  return attack_order_insertion(honest, select_targets(honest, cfg.target), factory, now);
}

std::vector<Transaction> attacker_block_txs(const Mempool& pool, const AttackConfig& cfg,
                                            AttackerTxFactory& factory, Millis now) {
  switch (cfg.type1) {
    case Type1Mode::Displacement: return attack_order_displacement(pool, cfg, factory, now);
    case Type1Mode::Insertion: return attack_order_insertion(pool, cfg, factory, now);
    case Type1Mode::Off: break;
  }
  return pool.honest_order();
}

std::optional<SealPlan> attack_zero_delay(NodeId sealer, Millis now, const CliqueConfig& cfg, const Block& tip,
                                          const RecentSigners& window, const AttackConfig& attack) {
  if (!attack.type2) return std::nullopt;
  const auto index = cfg.sealers.index_of(sealer);
  if (!index) return std::nullopt;
  const std::uint64_t next = tip.number() + 1;
  if (clique_in_turn(next, *index, cfg) || sign_recently(sealer, next, window, cfg)) return std::nullopt;
  SealPlan plan;
  plan.number = next;
  plan.parent = tip.id();
  plan.sealer = sealer;
  plan.difficulty = 1;
  plan.timestamp = std::max(clique_scheduled_time(tip, cfg), now);
  plan.send_at = plan.timestamp;
  return plan;
}

}  // namespace poa
