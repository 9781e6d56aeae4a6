#include "poa/aura.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace poa {

void validate(const AuraConfig& cfg) {
  if (cfg.duration <= 0) throw std::invalid_argument("aura: duration must be positive");
  if (cfg.sealers.size() == 0) throw std::invalid_argument("aura: empty committee");
}

std::uint64_t aura_step(Millis t, const AuraConfig& cfg) {
  return static_cast<std::uint64_t>(t / cfg.duration);
}

NodeId aura_leader(std::uint64_t step, const AuraConfig& cfg) { return cfg.sealers.at(step % cfg.sealers.size()); }

std::uint32_t aura_difficulty(std::uint64_t step, NodeId sealer, const AuraConfig& cfg) {
  return aura_leader(step, cfg) == sealer ? 2 : 0;
}

BlockPtr aura_propose(NodeId sealer, Millis t, const Mempool& pool, const AuraConfig& cfg, const Block& tip) {
  const std::uint64_t step = aura_step(t, cfg);
  if (aura_leader(step, cfg) != sealer) return nullptr;
  BlockHeader h;
  h.number = tip.number() + 1;
  h.parent = tip.id();
  h.sealer = sealer;
  h.difficulty = 2;
  h.timestamp = t;
  return make_block(std::move(h), pool.honest_order());
}

bool aura_verify(const Block& block, const AuraConfig& cfg) {
  const auto& h = block.header();
  if (h.timestamp < 0 || h.difficulty == 0) return false;
  return aura_difficulty(aura_step(h.timestamp, cfg), h.sealer, cfg) == h.difficulty;
}

bool aura_accept(std::span<const Vote> votes, BlockId block, const AuraConfig& cfg) {
  std::vector<NodeId> voters;
  for (const Vote& v : votes)
    if (v.block == block && cfg.sealers.contains(v.voter)) voters.push_back(v.voter);
  std::sort(voters.begin(), voters.end());
  const auto distinct = static_cast<std::size_t>(std::unique(voters.begin(), voters.end()) - voters.begin());
  return 2 * distinct > cfg.sealers.size();
}

}  // namespace poa
