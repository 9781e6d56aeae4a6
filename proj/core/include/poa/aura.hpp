#pragma once

#include <cstdint>
#include <span>

#include "poa/committee.hpp"
#include "poa/mempool.hpp"
#include "poa/types.hpp"

namespace poa {

struct AuraConfig {
  Millis duration{3000};
  Committee sealers;
};

/// Throws std::invalid_argument when duration <= 0.
void validate(const AuraConfig& cfg);

std::uint64_t aura_step(Millis t, const AuraConfig& cfg);
NodeId aura_leader(std::uint64_t step, const AuraConfig& cfg);

/// 2 for the step leader, 0 for anyone else.
std::uint32_t aura_difficulty(std::uint64_t step, NodeId sealer, const AuraConfig& cfg);

/// Leader-only proposal carrying every pending transaction in honest order.
/// Returns nullptr for non-leaders.
BlockPtr aura_propose(NodeId sealer, Millis t, const Mempool& pool, const AuraConfig& cfg, const Block& tip);

/// Recomputes the difficulty for the claimed sealer at the step given by the
/// block timestamp. Difficulty 0 never verifies.
bool aura_verify(const Block& block, const AuraConfig& cfg);

/// More than half of the committee voted for `block` (duplicates count once,
/// non-members are ignored).
bool aura_accept(std::span<const Vote> votes, BlockId block, const AuraConfig& cfg);

}  // namespace poa
