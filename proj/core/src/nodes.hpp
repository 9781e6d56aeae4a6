#pragma once

#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "poa/adversary.hpp"
#include "poa/aura.hpp"
#include "poa/chain_store.hpp"
#include "poa/clique.hpp"
#include "poa/harness.hpp"
#include "poa/mempool.hpp"
#include "poa/netsim.hpp"
#include "poa/remedies.hpp"

namespace poa::detail {

/// What the attacker's blocks went through.
struct AttackerBlockFate {
  bool self_valid{false};
  std::uint32_t accepted_by{0};
  std::uint32_t rejected_by{0};
};

/// Run-wide read-only setup plus the shared journal.
struct NodeEnv {
  explicit NodeEnv(const ExperimentConfig& cfg);

  ExperimentConfig cfg;
  Committee committee;
  AuraConfig aura;
  CliqueConfig clique;
  HpbConfig hpb;
  VrfConfig vrf;
  HardwareOracle oracle;
  std::vector<VrfKeyPair> keys;
  std::vector<Digest> public_keys;
  VrfRegistry registry;
  AttackConfig attack;
  bool sleeps{false};
  RunJournal journal;
  /// Attacker transactions draw ids from a range disjoint from user ids.
  TxIdAllocator attacker_ids{std::uint64_t{1} << 62};
  std::unordered_map<BlockId, AttackerBlockFate> attacker_blocks;
};

class SealerNode : public NodeBehavior {
 public:
  SealerNode(NodeId id, NodeEnv& env);

  const ChainStore* chain() const override { return &chain_; }
  const Mempool& pool() const { return pool_; }

  void start(NodeContext& ctx) override { on_tip(ctx); }
  void on_transaction(NodeContext& ctx, const Transaction& tx, bool local) override;
  void on_block(NodeContext& ctx, NodeId from, const BlockPtr& block) override;
  void on_block_request(NodeContext& ctx, NodeId from, BlockId id) override;
  void on_timer(NodeContext& ctx, std::uint64_t token) override;
  void on_crash(Millis now) override;
  void on_recover(NodeContext& ctx) override { on_tip(ctx); }

 protected:
  struct Pending {
    std::uint64_t token{0};
    SealPlan plan;
    std::uint64_t trace{0};
    VrfClaim claim;
    bool forged{false};
  };

  bool is_attacker() const { return env_.attack.active() && env_.attack.attacker == id_; }
  bool honest_sleeper() const { return env_.sleeps && !is_attacker(); }
  std::size_t index() const { return index_; }

  /// Consensus rule check for a block whose parent is stored.
  virtual bool verify(const Block& block, const StoredBlock& parent, Millis now) = 0;
  /// Re-plans after the canonical tip moved (also on start and recovery).
  virtual void on_tip(NodeContext& ctx) = 0;
  virtual BlockPtr build(const Pending& p, std::vector<Transaction> txs) = 0;

  void arm(NodeContext& ctx, Pending p);
  /// Stores a received block; returns true when the canonical tip moved.
  bool accept(NodeContext& ctx, NodeId from, const BlockPtr& block);
  /// Local insert and broadcast of an own block.
  void publish(NodeContext& ctx, const BlockPtr& block);
  std::vector<Transaction> block_txs(Millis now);
  void note_rejection(const Block& block);
  void sync_pool(BlockId old_tip, BlockId new_tip);
  BlockValidator validator(Millis now, bool count);

  NodeId id_;
  std::size_t index_;
  NodeEnv& env_;
  ChainStore chain_;
  Mempool pool_;
  Rng rng_;
  AttackerTxFactory factory_;
  std::vector<Pending> pending_;
  std::unordered_set<BlockId> rejected_;
  std::unordered_set<BlockId> requested_;
  std::uint64_t next_token_{1};
};

class CliqueNode final : public SealerNode {
 public:
  using SealerNode::SealerNode;

 protected:
  bool verify(const Block& block, const StoredBlock& parent, Millis now) override;
  void on_tip(NodeContext& ctx) override;
  BlockPtr build(const Pending& p, std::vector<Transaction> txs) override;
};

class VrfNode final : public SealerNode {
 public:
  using SealerNode::SealerNode;

 protected:
  bool verify(const Block& block, const StoredBlock& parent, Millis now) override;
  void on_tip(NodeContext& ctx) override;
  BlockPtr build(const Pending& p, std::vector<Transaction> txs) override;
};

class AuraNode final : public SealerNode {
 public:
  using SealerNode::SealerNode;

  void start(NodeContext& ctx) override;
  void on_block(NodeContext& ctx, NodeId from, const BlockPtr& block) override;
  void on_vote(NodeContext& ctx, NodeId from, const Vote& vote) override;
  void on_timer(NodeContext& ctx, std::uint64_t token) override;
  void on_crash(Millis now) override;
  void on_recover(NodeContext& ctx) override;

 protected:
  bool verify(const Block& block, const StoredBlock& parent, Millis now) override;
  void on_tip(NodeContext& /*ctx*/) override {}
  BlockPtr build(const Pending& p, std::vector<Transaction> txs) override;

 private:
  struct Candidate {
    BlockPtr block;
    NodeId from;
    std::vector<NodeId> voters;
  };

  void schedule_step(NodeContext& ctx, std::uint64_t step);
  void consider(NodeContext& ctx, NodeId from, const BlockPtr& block);
  void add_vote(NodeId voter, BlockId block);
  void try_accept(NodeContext& ctx, BlockId block);

  std::unordered_map<BlockId, Candidate> candidates_;
  std::uint32_t epoch_{0};
};

std::unique_ptr<SealerNode> make_node(NodeId id, NodeEnv& env);

}  // namespace poa::detail
