#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "poa/chain_store.hpp"
#include "support.hpp"

namespace poa {
namespace {

using test::child_of;

TEST(ChainStore, SingleChildBecomesTip) {
  ChainStore store;
  const auto& g = store.tip_block();
  auto b = child_of(g, 0, 2, 3000);
  const auto res = store.insert_block(b, 3000);
  EXPECT_EQ(res.outcome, InsertOutcome::Inserted);
  EXPECT_TRUE(res.tip_changed);
  EXPECT_EQ(store.tip(), b->id());
  EXPECT_EQ(store.tip_entry().score, 2U);
}

TEST(ChainStore, HigherDifficultySiblingWins) {
  for (bool d2_first : {true, false}) {
    ChainStore store;
    const auto g = store.canonical_chain()[0];
    auto d2 = child_of(*g, 1, 2, 3000);
    auto d1 = child_of(*g, 2, 1, 3000);
    if (d2_first) {
      store.insert_block(d2, 10);
      store.insert_block(d1, 20);
    } else {
      store.insert_block(d1, 10);
      store.insert_block(d2, 20);
    }
    EXPECT_EQ(store.tip(), d2->id());
  }
}

TEST(ChainStore, EqualScoreSameArrivalSmallerIdWins) {
  ChainStore a;
  ChainStore b;
  const auto g = a.canonical_chain()[0];
  auto x = child_of(*g, 1, 1, 3000);
  auto y = child_of(*g, 2, 1, 3100);
  const BlockId smaller = std::min(x->id(), y->id());
  a.insert_block(x, 50);
  a.insert_block(y, 50);
  b.insert_block(y, 50);
  b.insert_block(x, 50);
  EXPECT_EQ(a.tip(), smaller);
  EXPECT_EQ(b.tip(), smaller);
}

TEST(ChainStore, EqualScoreEarlierArrivalWins) {
  ChainStore store;
  const auto g = store.canonical_chain()[0];
  // Two branches of score 4: (2,2) and (1,1,2).
  auto a1 = child_of(*g, 0, 2, 3000);
  auto a2 = child_of(*a1, 1, 2, 6000);
  auto b1 = child_of(*g, 2, 1, 3000);
  auto b2 = child_of(*b1, 3, 1, 6000);
  auto b3 = child_of(*b2, 4, 2, 9000);
  store.insert_block(b1, 1);
  store.insert_block(b2, 2);
  store.insert_block(b3, 3);  // t1
  store.insert_block(a1, 4);
  store.insert_block(a2, 5);  // t2 > t1
  EXPECT_EQ(store.find(a2->id())->score, 4U);
  EXPECT_EQ(store.find(b3->id())->score, 4U);
  EXPECT_EQ(store.tip(), b3->id());
  EXPECT_EQ(fork_choice(store), b3->id());
}

TEST(ChainStore, StrictlyHigherScoreWins) {
  ChainStore store;
  auto g = store.canonical_chain()[0];
  BlockPtr six = g;
  for (int i = 0; i < 3; ++i) {
    six = child_of(*six, 0, 2, 3000 * (i + 1));
    store.insert_block(six, 100 + i);
  }
  BlockPtr five = g;
  for (int i = 0; i < 5; ++i) {
    five = child_of(*five, 1, 1, 3000 * (i + 1));
    store.insert_block(five, i);
  }
  EXPECT_EQ(store.find(five->id())->score, 5U);
  EXPECT_EQ(store.tip(), six->id());
}

TEST(ChainStore, GenesisOnlyStore) {
  ChainStore store;
  EXPECT_EQ(fork_choice(store), store.genesis());
  EXPECT_EQ(store.tip(), store.genesis());
}

TEST(ChainStore, OrphanBufferedUntilParentArrives) {
  ChainStore store;
  auto g = store.canonical_chain()[0];
  auto b1 = child_of(*g, 1, 2, 3000);
  auto b2 = child_of(*b1, 2, 2, 6000);
  EXPECT_EQ(store.insert_block(b2, 10).outcome, InsertOutcome::Buffered);
  EXPECT_TRUE(store.is_buffered(b2->id()));
  EXPECT_EQ(store.insert_block(b2, 11).outcome, InsertOutcome::Duplicate);
  const auto res = store.insert_block(b1, 20);
  EXPECT_EQ(res.outcome, InsertOutcome::Inserted);
  ASSERT_EQ(res.stored.size(), 2U);
  EXPECT_EQ(res.stored[1], b2->id());
  EXPECT_EQ(store.tip(), b2->id());
  EXPECT_EQ(store.orphan_count(), 0U);
}

TEST(ChainStore, OrphanOverflowDropsOldest) {
  ChainStore store(make_genesis(), 2);
  auto g = store.canonical_chain()[0];
  auto p = child_of(*g, 1, 2, 3000);
  auto o1 = child_of(*p, 2, 2, 6000);
  auto o2 = child_of(*p, 3, 1, 6000);
  auto o3 = child_of(*p, 4, 1, 6001);
  store.insert_block(o1, 1);
  store.insert_block(o2, 2);
  store.insert_block(o3, 3);
  EXPECT_EQ(store.orphan_count(), 2U);
  EXPECT_FALSE(store.is_buffered(o1->id()));
  EXPECT_TRUE(store.is_buffered(o3->id()));
}

TEST(ChainStore, StructuralRejections) {
  ChainStore store;
  auto g = store.canonical_chain()[0];
  EXPECT_EQ(store.insert_block(child_of(*g, 1, 0, 3000), 1).outcome, InsertOutcome::Rejected);
  EXPECT_EQ(store.insert_block(child_of(*g, 1, 3, 3000), 1).outcome, InsertOutcome::Rejected);
  BlockHeader h;
  h.number = 5;
  h.parent = g->id();
  h.sealer = NodeId{1};
  h.difficulty = 2;
  EXPECT_EQ(store.insert_block(make_block(h, {}), 1).outcome, InsertOutcome::Rejected);
  auto ok = child_of(*g, 1, 2, 3000);
  EXPECT_EQ(store.insert_block(ok, 1, [](const Block&, const StoredBlock&) { return false; }).outcome,
            InsertOutcome::Rejected);
  EXPECT_EQ(store.size(), 1U);
}

TEST(ChainStore, ConfirmedBlocksCut) {
  ChainStore store;
  BlockPtr b = store.canonical_chain()[0];
  for (int i = 1; i <= 10; ++i) {
    b = child_of(*b, 0, 2, 3000 * i);
    store.insert_block(b, i);
  }
  auto cut = confirmed_blocks(store, 6);
  ASSERT_EQ(cut.size(), 5U);
  for (std::size_t i = 0; i < cut.size(); ++i) EXPECT_EQ(cut[i]->number(), i);

  ChainStore short_store;
  BlockPtr s = short_store.canonical_chain()[0];
  for (int i = 1; i <= 3; ++i) {
    s = child_of(*s, 0, 2, 3000 * i);
    short_store.insert_block(s, i);
  }
  EXPECT_TRUE(confirmed_blocks(short_store, 6).empty());
  EXPECT_EQ(default_confirmation_depth(9), 5U);
}

TEST(ChainStore, ReorgAboveCutKeepsConfirmedPrefix) {
  ChainStore store;
  BlockPtr b = store.canonical_chain()[0];
  for (int i = 1; i <= 8; ++i) {
    b = child_of(*b, 0, 2, 3000 * i);
    store.insert_block(b, i);
  }
  const auto before = confirmed_blocks(store, 3);
  // A heavier branch forking at height 6, above the cut (heights 0..5).
  BlockPtr fork = store.canonical_chain()[6];
  for (int i = 7; i <= 10; ++i) {
    fork = child_of(*fork, 1, 2, 3000 * i + 1);
    store.insert_block(fork, 100 + i);
  }
  ASSERT_EQ(store.tip(), fork->id());
  const auto after = confirmed_blocks(store, 3);
  ASSERT_GE(after.size(), before.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(after[i]->id(), before[i]->id());
}

TEST(ChainStore, CanonicalChainAndAncestry) {
  ChainStore store;
  auto g = store.canonical_chain()[0];
  auto a = child_of(*g, 0, 2, 3000);
  auto b = child_of(*a, 1, 2, 6000);
  auto side = child_of(*g, 2, 1, 3001);
  store.insert_block(a, 1);
  store.insert_block(b, 2);
  store.insert_block(side, 3);
  const auto chain = store.canonical_chain();
  ASSERT_EQ(chain.size(), 3U);
  EXPECT_EQ(chain[2]->id(), b->id());
  EXPECT_TRUE(store.is_ancestor(a->id(), b->id()));
  EXPECT_FALSE(store.is_ancestor(side->id(), b->id()));
  EXPECT_EQ(store.chain_to(side->id()).size(), 2U);
}

// Random block trees: scores are additive, and every insertion order of
// the same blocks with the same arrival times yields the same tip.
TEST(ChainStoreProperty, ScoreAdditivityAndOrderIndependence) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 60; ++round) {
    ChainStore reference;
    std::vector<BlockPtr> blocks{reference.canonical_chain()[0]};
    std::vector<std::pair<BlockPtr, Millis>> inserted;
    for (int i = 0; i < 25; ++i) {
      const auto& parent = blocks[rng() % blocks.size()];
      auto blk = test::child_of(*parent, static_cast<std::uint32_t>(rng() % 9), 1 + static_cast<std::uint32_t>(rng() % 2),
                                parent->header().timestamp + 3000 + static_cast<Millis>(rng() % 50));
      blocks.push_back(blk);
      inserted.emplace_back(blk, static_cast<Millis>(rng() % 8));
    }
    for (const auto& [blk, at] : inserted) reference.insert_block(blk, at);
    for (const auto& [id, entry] : reference.blocks()) {
      EXPECT_EQ(entry.score, test::oracle_score(reference, id));
      if (const auto* p = reference.parent_of(id)) EXPECT_EQ(entry.score, p->score + entry.block->header().difficulty);
    }
    EXPECT_EQ(reference.tip(), fork_choice(reference));

    for (int perm = 0; perm < 5; ++perm) {
      auto shuffled = inserted;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      ChainStore other;
      for (const auto& [blk, at] : shuffled) other.insert_block(blk, at);
      EXPECT_EQ(other.size(), reference.size());
      EXPECT_EQ(other.tip(), reference.tip());
    }
  }
}

}  // namespace
}  // namespace poa
