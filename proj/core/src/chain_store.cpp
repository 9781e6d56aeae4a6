#include "poa/chain_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace poa {

bool better_tip(const StoredBlock& a, const StoredBlock& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.block->id() < b.block->id();
}

ChainStore::ChainStore(BlockPtr genesis, std::size_t orphan_limit) : orphan_limit_(orphan_limit) {
  if (!genesis) throw std::invalid_argument("ChainStore: null genesis");
  genesis_ = genesis->id();
  tip_ = genesis_;
  blocks_.emplace(genesis_, StoredBlock{std::move(genesis), 0, 0, {}});
}

const StoredBlock* ChainStore::find(BlockId id) const {
  auto it = blocks_.find(id);
  return it == blocks_.end() ? nullptr : &it->second;
}

bool ChainStore::is_buffered(BlockId id) const {
  return std::any_of(orphans_.begin(), orphans_.end(), [&](const Orphan& o) { return o.block->id() == id; });
}

const StoredBlock* ChainStore::parent_of(BlockId id) const {
  const auto* entry = find(id);
  if (entry == nullptr || id == genesis_) return nullptr;
  return find(entry->block->header().parent);
}

InsertResult ChainStore::insert_block(BlockPtr block, Millis arrival, const BlockValidator& validator) {
  InsertResult result;
  result.tip = tip_;
  if (!block) return result;

  const BlockId id = block->id();
  if (blocks_.contains(id) || is_buffered(id)) {
    result.outcome = InsertOutcome::Duplicate;
    return result;
  }

  if (!blocks_.contains(block->header().parent)) {
    if (orphan_limit_ == 0) return result;
    if (orphans_.size() >= orphan_limit_) orphans_.pop_front();
    orphans_.push_back(Orphan{std::move(block), arrival});
    result.outcome = InsertOutcome::Buffered;
    return result;
  }

  const BlockId before = tip_;
  if (!store(block, arrival, validator, result)) return result;
  result.outcome = InsertOutcome::Inserted;
  connect_orphans(id, validator, result);
  result.tip = tip_;
  result.tip_changed = tip_ != before;
  return result;
}

bool ChainStore::store(const BlockPtr& block, Millis arrival, const BlockValidator& validator,
                       InsertResult& result) {
  auto parent_it = blocks_.find(block->header().parent);
  const StoredBlock& parent = parent_it->second;
  const auto& h = block->header();
  if (h.number != parent.block->number() + 1) return false;
  if (h.difficulty != 1 && h.difficulty != 2) return false;
  if (validator && !validator(*block, parent)) return false;

  const std::uint64_t score = parent.score + h.difficulty;
  parent_it->second.children.push_back(block->id());
  auto [it, inserted] = blocks_.emplace(block->id(), StoredBlock{block, score, arrival, {}});
  result.stored.push_back(block->id());
  if (better_tip(it->second, blocks_.at(tip_))) tip_ = block->id();
  return true;
}

void ChainStore::connect_orphans(BlockId parent, const BlockValidator& validator, InsertResult& result) {
  std::vector<BlockId> frontier{parent};
  while (!frontier.empty()) {
    const BlockId p = frontier.back();
    frontier.pop_back();
    for (auto it = orphans_.begin(); it != orphans_.end();) {
      if (it->block->header().parent != p) {
        ++it;
        continue;
      }
      Orphan orphan = std::move(*it);
      it = orphans_.erase(it);
      if (store(orphan.block, orphan.arrival, validator, result)) frontier.push_back(orphan.block->id());
    }
  }
}

std::vector<BlockPtr> ChainStore::chain_to(BlockId head) const {
  std::vector<BlockPtr> out;
  const StoredBlock* entry = find(head);
  while (entry != nullptr) {
    out.push_back(entry->block);
    if (entry->block->id() == genesis_) break;
    entry = find(entry->block->header().parent);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<BlockPtr> ChainStore::canonical_chain() const { return chain_to(tip_); }

bool ChainStore::is_ancestor(BlockId ancestor, BlockId descendant) const {
  const StoredBlock* a = find(ancestor);
  const StoredBlock* d = find(descendant);
  if (a == nullptr || d == nullptr) return false;
  while (d != nullptr && d->block->number() > a->block->number()) d = find(d->block->header().parent);
  return d != nullptr && d->block->id() == ancestor;
}

BlockId fork_choice(const ChainStore& store) {
  const StoredBlock* best = nullptr;
  for (const auto& [id, entry] : store.blocks()) {
    if (best == nullptr || better_tip(entry, *best)) best = &entry;
  }
  return best->block->id();
}

std::vector<BlockPtr> confirmed_blocks(const ChainStore& store, std::uint64_t depth) {
  auto chain = store.canonical_chain();
  const std::uint64_t tip_height = chain.back()->number();
  if (tip_height < depth) return {};
  chain.resize(static_cast<std::size_t>(tip_height - depth + 1));
  return chain;
}

std::uint64_t default_confirmation_depth(std::size_t committee_size) { return committee_size / 2 + 1; }

}  // namespace poa
