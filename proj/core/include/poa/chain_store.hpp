#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "poa/types.hpp"

namespace poa {

struct StoredBlock {
  BlockPtr block;
  std::uint64_t score{0};  // sum of difficulties from genesis
  Millis arrival{0};       // local arrival time
  std::vector<BlockId> children;
};

enum class InsertOutcome : std::uint8_t {
  Inserted,   // stored (and possibly connected buffered descendants)
  Duplicate,  // already stored or buffered
  Buffered,   // parent unknown, held in the orphan buffer
  Rejected,   // failed structural checks or the validator
};

struct InsertResult {
  InsertOutcome outcome{InsertOutcome::Rejected};
  BlockId tip;
  bool tip_changed{false};
  /// Blocks stored by this call, in connection order.
  std::vector<BlockId> stored;
};

/// Hook run right before a block whose parent is known gets stored (also for
/// orphans released later). Returning false discards the block.
using BlockValidator = std::function<bool(const Block& block, const StoredBlock& parent)>;

/// True when `a` beats `b` for the canonical tip: higher score, then earlier
/// local arrival, then smaller block id.
bool better_tip(const StoredBlock& a, const StoredBlock& b);

/// Block tree rooted at genesis with cumulative scores and an incrementally
/// maintained canonical tip.
class ChainStore {
 public:
  static constexpr std::size_t kDefaultOrphanLimit = 64;

  explicit ChainStore(BlockPtr genesis = make_genesis(), std::size_t orphan_limit = kDefaultOrphanLimit);

  InsertResult insert_block(BlockPtr block, Millis arrival, const BlockValidator& validator = {});

  BlockId genesis() const { return genesis_; }
  BlockId tip() const { return tip_; }
  const StoredBlock& tip_entry() const { return blocks_.at(tip_); }
  const Block& tip_block() const { return *blocks_.at(tip_).block; }

  const StoredBlock* find(BlockId id) const;
  bool contains(BlockId id) const { return blocks_.contains(id); }
  bool is_buffered(BlockId id) const;
  std::size_t size() const { return blocks_.size(); }
  std::size_t orphan_count() const { return orphans_.size(); }

  /// Parent of `id`, or nullptr at genesis / unknown ids.
  const StoredBlock* parent_of(BlockId id) const;

  /// Canonical chain genesis..tip.
  std::vector<BlockPtr> canonical_chain() const;
  /// Chain genesis..`head`.
  std::vector<BlockPtr> chain_to(BlockId head) const;

  /// Whether `ancestor` lies on the path genesis..`descendant`.
  bool is_ancestor(BlockId ancestor, BlockId descendant) const;

  const std::unordered_map<BlockId, StoredBlock>& blocks() const { return blocks_; }

 private:
  struct Orphan {
    BlockPtr block;
    Millis arrival;
  };

  bool store(const BlockPtr& block, Millis arrival, const BlockValidator& validator, InsertResult& result);
  void connect_orphans(BlockId parent, const BlockValidator& validator, InsertResult& result);

  BlockId genesis_;
  BlockId tip_;
  std::size_t orphan_limit_;
  std::unordered_map<BlockId, StoredBlock> blocks_;
  std::deque<Orphan> orphans_;  // oldest first
};

/// Full-scan fork choice: the stored block with maximal score under the
/// tie-break of `better_tip`. Equals `ChainStore::tip()` by construction.
BlockId fork_choice(const ChainStore& store);

/// Canonical blocks at height <= tip height - depth, genesis first.
std::vector<BlockPtr> confirmed_blocks(const ChainStore& store, std::uint64_t depth);

/// Confirmation depth matching the recently-signed window: N/2 + 1.
std::uint64_t default_confirmation_depth(std::size_t committee_size);

}  // namespace poa
