#include "poa/clique.hpp"

#include <algorithm>
#include <stdexcept>

namespace poa {

void validate(const CliqueConfig& cfg) {
  if (cfg.sealers.size() == 0) throw std::invalid_argument("clique: empty committee");
  if (cfg.period <= 0) throw std::invalid_argument("clique: period must be positive");
  if (cfg.wiggle_unit < 0) throw std::invalid_argument("clique: wiggle unit must be non-negative");
}

std::size_t recent_window_length(std::size_t committee_size) {
  if (committee_size == 0) return 0;
  return std::min(committee_size / 2 + 1, committee_size - 1);
}

Millis wiggle_bound(const CliqueConfig& cfg) {
  return static_cast<Millis>(cfg.sealers.size() / 2 + 1) * cfg.wiggle_unit;
}

bool RecentSigners::contains(NodeId sealer) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.second == sealer; });
}

RecentSigners recent_signers(const ChainStore& store, BlockId head, const CliqueConfig& cfg) {
  RecentSigners window;
  const std::size_t limit = recent_window_length(cfg.sealers.size());
  const StoredBlock* entry = store.find(head);
  while (entry != nullptr && window.entries.size() < limit && entry->block->number() > 0) {
    window.entries.emplace_back(entry->block->number(), entry->block->sealer());
    entry = store.find(entry->block->header().parent);
  }
  std::reverse(window.entries.begin(), window.entries.end());
  return window;
}

bool clique_in_turn(std::uint64_t next_number, std::size_t sealer_index, const CliqueConfig& cfg) {
  return next_number % cfg.sealers.size() == sealer_index;
}

NodeId clique_in_turn_sealer(std::uint64_t number, const CliqueConfig& cfg) {
  return cfg.sealers.at(number % cfg.sealers.size());
}

bool sign_recently(NodeId sealer, std::uint64_t next_number, const RecentSigners& window, const CliqueConfig& cfg) {
  const std::uint64_t limit = recent_window_length(cfg.sealers.size());
  for (const auto& [number, signer] : window.entries) {
    if (signer != sealer || number >= next_number) continue;
    if (next_number - number <= limit) return true;
  }
  return false;
}

std::size_t eligible_per_height(const CliqueConfig& cfg) {
  return cfg.sealers.size() - recent_window_length(cfg.sealers.size());
}

Millis wiggle_delay(const CliqueConfig& cfg, Rng& rng, Millis now, Millis scheduled) {
  const Millis base = std::max<Millis>(0, scheduled - now);
  return base + uniform_int(rng, 0, wiggle_bound(cfg));
}

BlockPtr seal(const SealPlan& plan, std::vector<Transaction> txs) {
  BlockHeader h;
  h.number = plan.number;
  h.parent = plan.parent;
  h.sealer = plan.sealer;
  h.difficulty = plan.difficulty;
  h.timestamp = plan.timestamp;
  return make_block(std::move(h), std::move(txs));
}

Millis clique_scheduled_time(const Block& tip, const CliqueConfig& cfg) { return tip.header().timestamp + cfg.period; }

std::optional<SealPlan> clique_plan(NodeId sealer, Millis now, const CliqueConfig& cfg, const Block& tip,
                                    const RecentSigners& window, Rng& rng) {
  const auto index = cfg.sealers.index_of(sealer);
  if (!index) return std::nullopt;
  const std::uint64_t next = tip.number() + 1;
  if (sign_recently(sealer, next, window, cfg)) return std::nullopt;

  const Millis scheduled = clique_scheduled_time(tip, cfg);
  SealPlan plan;
  plan.number = next;
  plan.parent = tip.id();
  plan.sealer = sealer;
  plan.timestamp = std::max(scheduled, now);
  if (clique_in_turn(next, *index, cfg)) {
    plan.difficulty = 2;
    plan.send_at = plan.timestamp;
  } else {
    plan.difficulty = 1;
    plan.send_at = now + wiggle_delay(cfg, rng, now, scheduled);
  }
  return plan;
}

std::optional<Proposal> clique_propose(NodeId sealer, Millis now, const Mempool& pool, const CliqueConfig& cfg,
                                       const Block& tip, const RecentSigners& window, Rng& rng) {
  auto plan = clique_plan(sealer, now, cfg, tip, window, rng);
  if (!plan) return std::nullopt;
  return Proposal{seal(*plan, pool.honest_order()), plan->send_at};
}

bool clique_verify(const Block& block, const CliqueConfig& cfg, const RecentSigners& window) {
  const auto& h = block.header();
  if (h.difficulty != 1 && h.difficulty != 2) return false;
  const auto index = cfg.sealers.index_of(h.sealer);
  if (!index) return false;
  if (sign_recently(h.sealer, h.number, window, cfg)) return false;
  if (h.difficulty == 2 && !clique_in_turn(h.number, *index, cfg)) return false;
  return true;
}

}  // namespace poa
