#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "poa/chain_store.hpp"
#include "poa/types.hpp"

namespace poa::test {

inline Transaction make_tx(std::uint64_t id, std::uint32_t sender, std::uint64_t nonce, std::uint64_t gas_price,
                           Millis arrival = 0) {
  Transaction tx;
  tx.id = TxId{id};
  tx.sender = AccountId{sender};
  tx.nonce = nonce;
  tx.gas_price = gas_price;
  tx.arrival_time = arrival;
  return tx;
}

inline BlockPtr child_of(const Block& parent, std::uint32_t sealer, std::uint32_t difficulty, Millis timestamp,
                         std::vector<Transaction> txs = {}) {
  BlockHeader h;
  h.number = parent.number() + 1;
  h.parent = parent.id();
  h.sealer = NodeId{sealer};
  h.difficulty = difficulty;
  h.timestamp = timestamp;
  return make_block(h, std::move(txs));
}

/// Random pool contents: `n` transactions from a few senders with small
/// price and arrival ranges so that ties on every key show up.
inline std::vector<Transaction> random_txs(std::mt19937_64& rng, std::size_t n) {
  std::vector<Transaction> txs;
  std::map<std::uint32_t, std::uint64_t> nonces;
  for (std::size_t i = 0; i < n; ++i) {
    const auto sender = static_cast<std::uint32_t>(rng() % 4);
    txs.push_back(make_tx((rng() % 1000) * 1000 + i, sender, nonces[sender]++, rng() % 5,
                          static_cast<Millis>(rng() % 3)));
  }
  return txs;
}

/// Oracle for the honest comparator, written as an explicit key comparison.
inline bool oracle_before(const Transaction& a, const Transaction& b) {
  const std::int64_t ka[4] = {-static_cast<std::int64_t>(a.gas_price), static_cast<std::int64_t>(a.nonce),
                              a.arrival_time, static_cast<std::int64_t>(a.id.value)};
  const std::int64_t kb[4] = {-static_cast<std::int64_t>(b.gas_price), static_cast<std::int64_t>(b.nonce),
                              b.arrival_time, static_cast<std::int64_t>(b.id.value)};
  for (int i = 0; i < 4; ++i)
    if (ka[i] != kb[i]) return ka[i] < kb[i];
  return false;
}

/// Selection sort under the oracle comparator.
inline std::vector<Transaction> oracle_order(std::vector<Transaction> txs) {
  for (std::size_t i = 0; i < txs.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < txs.size(); ++j)
      if (oracle_before(txs[j], txs[best])) best = j;
    std::swap(txs[i], txs[best]);
  }
  return txs;
}

/// Score recomputed from scratch by walking to genesis.
inline std::uint64_t oracle_score(const ChainStore& store, BlockId id) {
  std::uint64_t s = 0;
  for (const StoredBlock* e = store.find(id); e != nullptr; e = store.parent_of(e->block->id()))
    s += e->block->header().difficulty;
  return s;
}

inline std::vector<std::uint64_t> ids_of(const std::vector<Transaction>& txs) {
  std::vector<std::uint64_t> out;
  for (const auto& tx : txs) out.push_back(tx.id.value);
  return out;
}

/// Half-width of a normal-approximation interval for a binomial proportion.
inline double binomial_halfwidth(double p, double n, double z = 4.0) { return z * std::sqrt(p * (1.0 - p) / n); }

}  // namespace poa::test
