#include "poa/mempool.hpp"

#include <algorithm>
#include <tuple>

namespace poa {

bool honest_before(const Transaction& a, const Transaction& b) {
  if (a.gas_price != b.gas_price) return a.gas_price > b.gas_price;
  return std::tie(a.nonce, a.arrival_time, a.id) < std::tie(b.nonce, b.arrival_time, b.id);
}

std::vector<Transaction> honest_order(std::span<const Transaction> txs) {
  std::vector<Transaction> out(txs.begin(), txs.end());
  std::sort(out.begin(), out.end(), honest_before);
  return out;
}

Mempool::Mempool(std::uint64_t block_gas_limit) : block_gas_limit_(block_gas_limit) {}

bool Mempool::validate_tx(const Transaction& tx) {
  if (tx.gas_limit == 0 || tx.gas_limit > block_gas_limit_) return false;

  const SlotKey key{tx.sender, tx.nonce};
  if (auto it = pending_.find(key); it != pending_.end()) {
    if (tx.gas_price <= it->second.gas_price) return false;
    it->second = tx;
    return true;
  }

  auto& expected = next_nonce_[tx.sender];
  if (tx.nonce != expected) return false;
  pending_.emplace(key, tx);
  ++expected;
  return true;
}

std::vector<Transaction> Mempool::honest_order() const {
  std::vector<Transaction> out;
  out.reserve(pending_.size());
  for (const auto& [key, tx] : pending_) out.push_back(tx);
  std::sort(out.begin(), out.end(), honest_before);
  return out;
}

void Mempool::note_included(const Transaction& tx) {
  pending_.erase(SlotKey{tx.sender, tx.nonce});
  auto& expected = next_nonce_[tx.sender];
  expected = std::max(expected, tx.nonce + 1);
}

void Mempool::restore(const Transaction& tx) { pending_.try_emplace(SlotKey{tx.sender, tx.nonce}, tx); }

bool Mempool::contains(const Transaction& tx) const {
  auto it = pending_.find(SlotKey{tx.sender, tx.nonce});
  return it != pending_.end() && it->second.id == tx.id;
}

std::uint64_t Mempool::next_nonce(AccountId sender) const {
  auto it = next_nonce_.find(sender);
  return it == next_nonce_.end() ? 0 : it->second;
}

}  // namespace poa
