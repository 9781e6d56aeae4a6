#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "poa/types.hpp"

namespace poa {

constexpr std::uint64_t kDefaultBlockGasLimit = 1'000'000'000'000ULL;

/// Strict weak order used by honest sealers: higher gas price first, then
/// lower nonce, earlier arrival, smaller id. Lexicographic, hence total on
/// distinct transactions.
bool honest_before(const Transaction& a, const Transaction& b);

/// Sorts an arbitrary transaction list by `honest_before`.
std::vector<Transaction> honest_order(std::span<const Transaction> txs);

/// Pending transaction pool of one node.
///
/// Slots are keyed by (sender, nonce). A sender's next expected nonce only
/// moves forward: on acceptance of a pending transaction and when a block
/// carrying the sender's transactions is applied to the canonical chain.
class Mempool {
 public:
  explicit Mempool(std::uint64_t block_gas_limit = kDefaultBlockGasLimit);

  /// Nonce and gas admission check. Accepted transactions are added; a
  /// transaction for an occupied slot replaces the occupant only when its gas
  /// price is strictly higher.
  bool validate_tx(const Transaction& tx);

  /// All pending transactions in honest order. Does not mutate the pool.
  std::vector<Transaction> honest_order() const;

  /// Applies a transaction carried by a canonical block: frees its slot and
  /// advances the sender's nonces past it.
  void note_included(const Transaction& tx);

  /// Reverts `note_included` for a transaction of an abandoned branch. Undo
  /// the old branch before applying the new one.
  void restore(const Transaction& tx);

  bool contains(const Transaction& tx) const;
  std::uint64_t next_nonce(AccountId sender) const;
  std::uint64_t block_gas_limit() const { return block_gas_limit_; }
  std::size_t size() const { return pending_.size(); }
  bool empty() const { return pending_.empty(); }

 private:
  struct SlotKey {
    AccountId sender;
    std::uint64_t nonce;
    bool operator==(const SlotKey&) const = default;
  };
  struct SlotHash {
    std::size_t operator()(const SlotKey& k) const noexcept {
      return static_cast<std::size_t>((static_cast<std::uint64_t>(k.sender.value) << 40) ^ k.nonce) *
             0x9e3779b97f4a7c15ULL;
    }
  };

  std::uint64_t block_gas_limit_;
  absl::flat_hash_map<SlotKey, Transaction, SlotHash> pending_;
  absl::flat_hash_map<AccountId, std::uint64_t, std::hash<AccountId>> next_nonce_;
};

}  // namespace poa
