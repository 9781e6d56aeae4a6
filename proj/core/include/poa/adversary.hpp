#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "poa/clique.hpp"
#include "poa/mempool.hpp"
#include "poa/random.hpp"
#include "poa/types.hpp"

namespace poa {

enum class Type1Mode : std::uint8_t { Off, Displacement, Insertion };

const char* to_string(Type1Mode mode);

/// Which pending user transactions the attacker goes after.
struct TargetRule {
  enum class Kind : std::uint8_t {
    AboveMedian,     // gas price strictly above the lower median of the pool
    AboveThreshold,  // gas price strictly above `threshold`
    All,
  };
  Kind kind{Kind::AboveMedian};
  std::uint64_t threshold{0};
};

struct AttackConfig {
  NodeId attacker;
  Type1Mode type1{Type1Mode::Off};
  bool type2{false};
  TargetRule target;
  /// Seal zero-delay blocks without transactions.
  bool empty_blocks{false};

  bool active() const { return attacker.valid() && (type1 != Type1Mode::Off || type2); }
};

/// Mints the attacker's own transactions. Ids come from the run-wide
/// allocator; nonces from the attacker's account sequence.
class AttackerTxFactory {
 public:
  AttackerTxFactory(NodeId attacker, TxIdAllocator& ids) : attacker_(attacker), ids_(&ids) {}

  /// Outbids the victim by one gas unit.
  Transaction make(TxKind kind, const Transaction& victim, Millis now);
  std::uint64_t minted() const { return next_nonce_; }

 private:
  NodeId attacker_;
  TxIdAllocator* ids_;
  std::uint64_t next_nonce_{0};
};

/// One flag per position of a transaction list; non-zero marks a target.
using TargetMask = std::vector<std::uint8_t>;

/// Marks targeted positions of a list already in honest order.
TargetMask select_targets(std::span<const Transaction> honest, const TargetRule& rule);

/// One AttackerFront right before each target.
std::vector<Transaction> attack_order_displacement(std::span<const Transaction> honest,
                                                   std::span<const std::uint8_t> targets, AttackerTxFactory& factory,
                                                   Millis now);

/// Each target wrapped as (AttackerFront, target, AttackerBack).
std::vector<Transaction> attack_order_insertion(std::span<const Transaction> honest, std::span<const std::uint8_t> targets,
                                                AttackerTxFactory& factory, Millis now);

/// `honest` rearranged so that position i holds honest[permutation[i]], with
/// an AttackerFront between consecutive entries when `interleave` is set.
/// Throws std::invalid_argument unless `permutation` is a permutation of
/// 0..n-1.
std::vector<Transaction> attack_arbitrary_reorder(std::span<const Transaction> honest,
                                                  std::span<const std::size_t> permutation, bool interleave,
                                                  AttackerTxFactory& factory, Millis now);

/// Seeded variant: a uniformly shuffled permutation, always interleaved.
std::vector<Transaction> attack_arbitrary_reorder(std::span<const Transaction> honest, Rng& rng,
                                                  AttackerTxFactory& factory, Millis now);

/// Pool-level entry points used by the sealing attacker.
std::vector<Transaction> attack_order_displacement(const Mempool& pool, const AttackConfig& cfg,
                                                   AttackerTxFactory& factory, Millis now);
std::vector<Transaction> attack_order_insertion(const Mempool& pool, const AttackConfig& cfg,
                                                AttackerTxFactory& factory, Millis now);

/// Transaction list for a block the attacker seals, per its Type-I mode.
std::vector<Transaction> attacker_block_txs(const Mempool& pool, const AttackConfig& cfg,
                                            AttackerTxFactory& factory, Millis now);

/// Edge-turn plan with the wiggle forfeited: difficulty 1, sent at the
/// scheduled time (or now if later). nullopt when Type-II is off, the sealer
/// is recently signed, or it is in turn.
std::optional<SealPlan> attack_zero_delay(NodeId sealer, Millis now, const CliqueConfig& cfg, const Block& tip,
                                          const RecentSigners& window, const AttackConfig& attack);

}  // namespace poa
