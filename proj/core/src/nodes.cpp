#include "nodes.hpp"

#include <algorithm>

namespace poa::detail {

NodeEnv::NodeEnv(const ExperimentConfig& c)
    : cfg(c),
      committee(c.committee()),
      oracle(c.hpb_oracle_seed.value_or(c.seed ^ 0x68617264776172ULL)),
      attack(c.attack_config()),
      sleeps(c.sleeps()) {
  aura.duration = c.period;
  aura.sealers = committee;
  clique.sealers = committee;
  clique.period = c.period;
  clique.wiggle_unit = c.wiggle_unit;
  hpb.clique = clique;
  vrf.sealers = committee;
  vrf.period = c.period;
  vrf.attempt_timeout = c.vrf_timeout;
  vrf.threshold = c.vrf_threshold;
  vrf.max_attempts = c.vrf_max_attempts;
  if (c.consensus == Consensus::Vrf) {
    for (std::size_t i = 0; i < committee.size(); ++i) {
      Rng r = make_stream(c.seed, StreamTag::VrfKey, i);
      keys.push_back(vrf_keygen(r()));
      public_keys.push_back(keys.back().pk);
      registry.add(keys.back());
    }
  }
}

SealerNode::SealerNode(NodeId id, NodeEnv& env)
    : id_(id),
      index_(*env.committee.index_of(id)),
      env_(env),
      pool_(env.cfg.block_gas_limit),
      rng_(make_stream(env.cfg.seed, StreamTag::Node, id.value)),
      factory_(id, env.attacker_ids) {
  chain_ = ChainStore(make_genesis());
}

void SealerNode::on_transaction(NodeContext& /*ctx*/, const Transaction& tx, bool /*local*/) { pool_.validate_tx(tx); }

void SealerNode::on_block_request(NodeContext& ctx, NodeId from, BlockId id) {
  if (const auto* entry = chain_.find(id)) ctx.send_block(from, entry->block);
}

void SealerNode::on_block(NodeContext& ctx, NodeId from, const BlockPtr& block) {
  if (accept(ctx, from, block)) on_tip(ctx);
}

void SealerNode::on_timer(NodeContext& ctx, std::uint64_t token) {
  auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Pending& p) { return p.token == token; });
  if (it == pending_.end()) return;
  Pending p = *it;
  pending_.erase(it);
  if (p.plan.parent != chain_.tip()) return;
  publish(ctx, build(p, p.forged ? std::vector<Transaction>{} : block_txs(ctx.now())));
}

void SealerNode::on_crash(Millis /*now*/) { pending_.clear(); }

void SealerNode::arm(NodeContext& ctx, Pending p) {
  p.token = next_token_++;
  p.plan.send_at = std::max(p.plan.send_at, ctx.now());
  ctx.schedule_timer(p.plan.send_at, p.token);
  pending_.push_back(p);
}

BlockValidator SealerNode::validator(Millis now, bool count) {
  return [this, now, count](const Block& block, const StoredBlock& parent) {
    if (count) ++env_.journal.verify_calls;
    const bool ok = verify(block, parent, now);
    if (count && !ok) note_rejection(block);
    return ok;
  };
}

void SealerNode::note_rejection(const Block& block) {
  rejected_.insert(block.id());
  ++env_.journal.rejected_blocks;
  if (auto it = env_.attacker_blocks.find(block.id()); it != env_.attacker_blocks.end()) {
    ++it->second.rejected_by;
    ++env_.journal.attacker_blocks_rejected;
  }
}

bool SealerNode::accept(NodeContext& ctx, NodeId from, const BlockPtr& block) {
  const BlockId id = block->id();
  if (chain_.contains(id) || rejected_.contains(id) || chain_.is_buffered(id)) return false;
  const BlockId old_tip = chain_.tip();
  const InsertResult res = chain_.insert_block(block, ctx.now(), validator(ctx.now(), true));
  if (res.outcome == InsertOutcome::Buffered) {
    requested_.insert(block->header().parent);
    ctx.request_block(from, block->header().parent);
    return false;
  }
  for (BlockId stored : res.stored)
    if (auto it = env_.attacker_blocks.find(stored); it != env_.attacker_blocks.end()) ++it->second.accepted_by;
  if (!res.tip_changed) return false;
  sync_pool(old_tip, res.tip);
  return true;
}

void SealerNode::publish(NodeContext& ctx, const BlockPtr& block) {
  env_.journal.sealed_at.emplace(block->id(), ctx.now());
  const BlockId old_tip = chain_.tip();
  const InsertResult res = chain_.insert_block(block, ctx.now(), validator(ctx.now(), false));
  const bool valid = res.outcome == InsertOutcome::Inserted;
  if (is_attacker()) {
    ++env_.journal.attacker_blocks_sent;
    env_.attacker_blocks[block->id()].self_valid = valid;
    ctx.broadcast_block(block);
  } else if (valid) {
    ctx.broadcast_block(block);
  }
  if (res.tip_changed) {
    sync_pool(old_tip, res.tip);
    on_tip(ctx);
  }
}

std::vector<Transaction> SealerNode::block_txs(Millis now) {
  std::vector<Transaction> txs;
  if (is_attacker() && env_.attack.empty_blocks) return txs;
  if (is_attacker() && env_.attack.type1 != Type1Mode::Off) {
    txs = attacker_block_txs(pool_, env_.attack, factory_, now);
  } else {
    txs = pool_.honest_order();
  }
  std::uint64_t gas = 0;
  std::size_t keep = 0;
  while (keep < txs.size() && gas + txs[keep].gas_limit <= pool_.block_gas_limit()) gas += txs[keep++].gas_limit;
  txs.resize(keep);
  return txs;
}

void SealerNode::sync_pool(BlockId old_tip, BlockId new_tip) {
  std::vector<const Block*> undo;
  std::vector<const Block*> apply;
  const StoredBlock* a = chain_.find(old_tip);
  const StoredBlock* b = chain_.find(new_tip);
  auto up = [&](const StoredBlock* e) { return chain_.find(e->block->header().parent); };
  while (a->block->number() > b->block->number()) {
    undo.push_back(a->block.get());
    a = up(a);
  }
  while (b->block->number() > a->block->number()) {
    apply.push_back(b->block.get());
    b = up(b);
  }
  while (a->block->id() != b->block->id()) {
    undo.push_back(a->block.get());
    apply.push_back(b->block.get());
    a = up(a);
    b = up(b);
  }
  for (const Block* blk : undo)
    for (const auto& tx : blk->txs())
      if (tx.kind == TxKind::User) pool_.restore(tx);
  for (auto it = apply.rbegin(); it != apply.rend(); ++it)
    for (const auto& tx : (*it)->txs()) pool_.note_included(tx);
}

// Clique, identity-patched Clique and the hardware-randomness rotation.

bool CliqueNode::verify(const Block& block, const StoredBlock& parent, Millis /*now*/) {
  switch (env_.cfg.consensus) {
    case Consensus::Hpb: return hpb_verify(block, env_.oracle, env_.hpb);
    case Consensus::CliquePatched:
      return clique_verify_patched(block, env_.clique, recent_signers(chain_, parent.block->id(), env_.clique));
    default: return clique_verify(block, env_.clique, recent_signers(chain_, parent.block->id(), env_.clique));
  }
}

void CliqueNode::on_tip(NodeContext& ctx) {
  pending_.clear();
  const Block& tip = chain_.tip_block();
  const std::uint64_t next = tip.number() + 1;
  const Millis now = ctx.now();
  const bool zero_delay = is_attacker() && env_.attack.type2;

  if (env_.cfg.consensus == Consensus::Hpb) {
    const std::uint64_t trace = env_.oracle.sample(next);
    if (honest_sleeper() && index() == hpb_in_turn_index(trace, env_.committee.size())) return;
    auto plan = hpb_plan(id_, now, env_.oracle, env_.hpb, tip, rng_);
    if (!plan) return;
    if (zero_delay && plan->difficulty == 1) {
      plan->send_at = plan->timestamp;
      env_.journal.frontrun_parents.insert(tip.id());
    }
    arm(ctx, Pending{0, *plan, trace, {}, false});
    return;
  }

  const RecentSigners window = recent_signers(chain_, tip.id(), env_.clique);
  if (honest_sleeper() && clique_in_turn_sealer(next, env_.clique) == id_) return;
  std::optional<SealPlan> plan;
  if (zero_delay) {
    plan = attack_zero_delay(id_, now, env_.clique, tip, window, env_.attack);
    if (plan) env_.journal.frontrun_parents.insert(tip.id());
  }
  if (!plan) plan = clique_plan(id_, now, env_.clique, tip, window, rng_);
  if (plan) arm(ctx, Pending{0, *plan, 0, {}, false});
}

BlockPtr CliqueNode::build(const Pending& p, std::vector<Transaction> txs) {
  if (env_.cfg.consensus == Consensus::Hpb) return hpb_seal(p.plan, p.trace, std::move(txs));
  return seal(p.plan, std::move(txs));
}

// VRF election.

bool VrfNode::verify(const Block& block, const StoredBlock& parent, Millis now) {
  if (block.header().timestamp > now) return false;
  return vrf_check(block, *parent.block, env_.registry, env_.public_keys, env_.vrf) == VrfVerdict::Ok;
}

void VrfNode::on_tip(NodeContext& ctx) {
  pending_.clear();
  const Block& tip = chain_.tip_block();
  const VrfKeyPair& keys = env_.keys[index()];
  if (is_attacker() && env_.attack.type2) {
    const VrfClaim claim = vrf_claim(keys, tip, 0);
    if (!vrf_is_candidate(claim.output, vrf_threshold(env_.vrf))) {
      Pending forged;
      forged.plan.number = tip.number() + 1;
      forged.plan.parent = tip.id();
      forged.plan.sealer = id_;
      forged.plan.difficulty = 2;
      forged.plan.timestamp = vrf_slot_time(tip, 0, env_.vrf);
      forged.plan.send_at = forged.plan.timestamp;
      forged.claim = claim;
      forged.forged = true;
      arm(ctx, forged);
    }
  }
  for (std::uint32_t attempt = honest_sleeper() ? 1 : 0; attempt < env_.vrf.max_attempts; ++attempt) {
    if (auto ticket = vrf_plan(id_, keys, tip, attempt, env_.vrf)) {
      arm(ctx, Pending{0, ticket->plan, 0, ticket->claim, false});
      return;
    }
  }
}

BlockPtr VrfNode::build(const Pending& p, std::vector<Transaction> txs) {
  return vrf_seal(p.plan, p.claim, std::move(txs));
}

// Aura: step timers, vote gathering, majority acceptance.

namespace {
constexpr std::uint64_t kStepBit = std::uint64_t{1} << 63;
}

void AuraNode::start(NodeContext& ctx) { schedule_step(ctx, aura_step(ctx.now(), env_.aura) + 1); }

void AuraNode::on_crash(Millis now) {
  SealerNode::on_crash(now);
  ++epoch_;
}

void AuraNode::on_recover(NodeContext& ctx) { schedule_step(ctx, aura_step(ctx.now(), env_.aura) + 1); }

void AuraNode::schedule_step(NodeContext& ctx, std::uint64_t step) {
  const std::uint64_t token = kStepBit | (static_cast<std::uint64_t>(epoch_) << 40) | step;
  ctx.schedule_timer(static_cast<Millis>(step) * env_.aura.duration, token);
}

bool AuraNode::verify(const Block& block, const StoredBlock& parent, Millis now) {
  if (block.header().timestamp > now || !aura_verify(block, env_.aura)) return false;
  return aura_step(block.header().timestamp, env_.aura) > aura_step(parent.block->header().timestamp, env_.aura) ||
         parent.block->number() == 0;
}

BlockPtr AuraNode::build(const Pending& p, std::vector<Transaction> txs) { return seal(p.plan, std::move(txs)); }

void AuraNode::on_timer(NodeContext& ctx, std::uint64_t token) {
  if ((token & kStepBit) == 0) return;
  if (((token >> 40) & 0x7fffff) != epoch_) return;
  const std::uint64_t step = token & ((std::uint64_t{1} << 40) - 1);
  schedule_step(ctx, step + 1);

  const Millis t = static_cast<Millis>(step) * env_.aura.duration;
  const Block& tip = chain_.tip_block();
  const bool leader = aura_leader(step, env_.aura) == id_;
  Pending p;
  p.plan.number = tip.number() + 1;
  p.plan.parent = tip.id();
  p.plan.sealer = id_;
  p.plan.timestamp = t;
  p.plan.send_at = t;
  if (leader && !honest_sleeper()) {
    p.plan.difficulty = aura_difficulty(step, id_, env_.aura);
  } else if (!leader && is_attacker() && env_.attack.type2) {
    p.plan.difficulty = 1;
  } else {
    return;
  }
  const BlockPtr block = build(p, block_txs(t));
  const bool valid = aura_verify(*block, env_.aura);
  env_.journal.sealed_at.emplace(block->id(), t);
  if (is_attacker()) {
    ++env_.journal.attacker_blocks_sent;
    env_.attacker_blocks[block->id()].self_valid = valid;
  }
  if (!valid && !is_attacker()) return;
  ctx.broadcast_block(block);
  if (!valid) return;
  if (env_.cfg.aura_votes) {
    consider(ctx, id_, block);
  } else {
    accept(ctx, id_, block);
  }
}

void AuraNode::on_block(NodeContext& ctx, NodeId from, const BlockPtr& block) {
  const BlockId id = block->id();
  if (chain_.contains(id) || rejected_.contains(id) || chain_.is_buffered(id)) return;
  // Ancestors fetched on request were finalized by their voters already.
  if (!env_.cfg.aura_votes || requested_.erase(id) > 0) {
    accept(ctx, from, block);
    return;
  }
  if (auto it = candidates_.find(id); it != candidates_.end() && it->second.block) return;
  ++env_.journal.verify_calls;
  if (block->header().timestamp > ctx.now() || !aura_verify(*block, env_.aura)) {
    note_rejection(*block);
    return;
  }
  consider(ctx, from, block);
}

void AuraNode::consider(NodeContext& ctx, NodeId from, const BlockPtr& block) {
  auto& cand = candidates_[block->id()];
  cand.block = block;
  cand.from = from;
  add_vote(id_, block->id());
  ++env_.journal.votes_sent;
  ctx.broadcast_vote(Vote{id_, block->id()});
  try_accept(ctx, block->id());
}

void AuraNode::on_vote(NodeContext& ctx, NodeId from, const Vote& vote) {
  if (chain_.contains(vote.block) || rejected_.contains(vote.block)) return;
  if (!env_.committee.contains(from)) return;
  add_vote(from, vote.block);
  try_accept(ctx, vote.block);
}

void AuraNode::add_vote(NodeId voter, BlockId block) {
  auto& voters = candidates_[block].voters;
  if (std::find(voters.begin(), voters.end(), voter) == voters.end()) voters.push_back(voter);
}

void AuraNode::try_accept(NodeContext& ctx, BlockId id) {
  auto it = candidates_.find(id);
  if (it == candidates_.end() || !it->second.block) return;
  if (2 * it->second.voters.size() <= env_.committee.size()) return;
  const BlockPtr block = it->second.block;
  const NodeId from = it->second.from;
  candidates_.erase(it);
  accept(ctx, from, block);
}

std::unique_ptr<SealerNode> make_node(NodeId id, NodeEnv& env) {
  switch (env.cfg.consensus) {
    case Consensus::Aura: return std::make_unique<AuraNode>(id, env);
    case Consensus::Vrf: return std::make_unique<VrfNode>(id, env);
    default: return std::make_unique<CliqueNode>(id, env);
  }
}

}  // namespace poa::detail
