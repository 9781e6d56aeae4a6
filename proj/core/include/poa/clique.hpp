#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "poa/chain_store.hpp"
#include "poa/committee.hpp"
#include "poa/mempool.hpp"
#include "poa/random.hpp"
#include "poa/types.hpp"

namespace poa {

struct CliqueConfig {
  Committee sealers;
  Millis period{3000};
  Millis wiggle_unit{500};
};

/// Throws std::invalid_argument on a non-positive period or negative wiggle unit.
void validate(const CliqueConfig& cfg);

/// Length of the recently-signed window: N/2 + 1, capped at N - 1 so that
/// committees of one or two sealers can still make progress.
std::size_t recent_window_length(std::size_t committee_size);

/// Maximum wiggle: (N/2 + 1) * wiggle_unit.
Millis wiggle_bound(const CliqueConfig& cfg);

/// Sealers of the most recent blocks on one branch, newest last.
struct RecentSigners {
  std::vector<std::pair<std::uint64_t, NodeId>> entries;

  bool contains(NodeId sealer) const;
};

/// Window ending at `head` (inclusive), genesis excluded.
RecentSigners recent_signers(const ChainStore& store, BlockId head, const CliqueConfig& cfg);

bool clique_in_turn(std::uint64_t next_number, std::size_t sealer_index, const CliqueConfig& cfg);
NodeId clique_in_turn_sealer(std::uint64_t number, const CliqueConfig& cfg);

/// True when `sealer` signed one of the window's blocks preceding
/// `next_number`, i.e. it has to wait.
bool sign_recently(NodeId sealer, std::uint64_t next_number, const RecentSigners& window, const CliqueConfig& cfg);

/// Sealers free to seal any one height: N minus the window length.
std::size_t eligible_per_height(const CliqueConfig& cfg);

/// base + U[0, wiggle_bound], with base = max(0, scheduled - now).
Millis wiggle_delay(const CliqueConfig& cfg, Rng& rng, Millis now, Millis scheduled);

/// A sealing decision taken now; transactions are chosen when it fires.
struct SealPlan {
  std::uint64_t number{0};
  BlockId parent;
  NodeId sealer;
  std::uint32_t difficulty{0};
  Millis timestamp{0};
  Millis send_at{0};
};

BlockPtr seal(const SealPlan& plan, std::vector<Transaction> txs);

/// Scheduled time of the child of `tip`.
Millis clique_scheduled_time(const Block& tip, const CliqueConfig& cfg);

/// nullopt when the sealer is recently signed or not a member. In-turn plans
/// carry difficulty 2 and no wiggle; edge-turn plans difficulty 1 and a
/// wiggle drawn from `rng`.
std::optional<SealPlan> clique_plan(NodeId sealer, Millis now, const CliqueConfig& cfg, const Block& tip,
                                    const RecentSigners& window, Rng& rng);

struct Proposal {
  BlockPtr block;
  Millis send_at{0};
};

/// `clique_plan` followed by `seal` over the pool's honest order.
std::optional<Proposal> clique_propose(NodeId sealer, Millis now, const Mempool& pool, const CliqueConfig& cfg,
                                       const Block& tip, const RecentSigners& window, Rng& rng);

/// Difficulty in {1, 2}, sealer a member and not recently signed, and a
/// difficulty-2 block must come from the in-turn sealer. Difficulty-1 blocks
/// are not matched against any expected sealer. `window` is the one ending at
/// the block's parent.
bool clique_verify(const Block& block, const CliqueConfig& cfg, const RecentSigners& window);

}  // namespace poa
