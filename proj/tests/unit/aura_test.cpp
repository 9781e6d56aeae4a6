#include <gtest/gtest.h>

#include <set>

#include "poa/aura.hpp"
#include "support.hpp"

namespace poa {
namespace {

AuraConfig config(std::size_t n, Millis duration = 3000) {
  AuraConfig cfg;
  cfg.duration = duration;
  cfg.sealers = Committee::of_size(n);
  return cfg;
}

TEST(Aura, Step) {
  const auto cfg = config(9);
  EXPECT_EQ(aura_step(0, cfg), 0U);
  EXPECT_EQ(aura_step(30000, cfg), 10U);
  EXPECT_EQ(aura_step(30001, cfg), 10U);
  EXPECT_EQ(aura_step(29999, cfg), 9U);
}

TEST(Aura, Leader) {
  const auto cfg = config(9);
  EXPECT_EQ(aura_leader(10, cfg), NodeId{1});
  EXPECT_EQ(aura_leader(0, cfg), NodeId{0});
  EXPECT_EQ(aura_leader(9, cfg), NodeId{0});
  const auto four = config(4);
  EXPECT_EQ(aura_leader(0, four), NodeId{0});
  EXPECT_EQ(aura_leader(4, four), NodeId{0});
}

TEST(Aura, LeaderFollowsCommitteeOrder) {
  AuraConfig cfg;
  cfg.sealers = Committee({NodeId{5}, NodeId{2}, NodeId{7}});
  EXPECT_EQ(aura_leader(0, cfg), NodeId{5});
  EXPECT_EQ(aura_leader(1, cfg), NodeId{2});
  EXPECT_EQ(aura_leader(5, cfg), NodeId{7});
}

TEST(Aura, RoundRobinCoverage) {
  const auto cfg = config(9);
  for (std::uint64_t start : {0ULL, 4ULL, 1000ULL}) {
    std::multiset<NodeId> leaders;
    for (std::uint64_t s = start; s < start + 9; ++s) leaders.insert(aura_leader(s, cfg));
    for (std::uint32_t i = 0; i < 9; ++i) EXPECT_EQ(leaders.count(NodeId{i}), 1U);
  }
}

TEST(Aura, LeaderProposesPendingTransactions) {
  const auto cfg = config(9);
  Mempool pool;
  for (std::uint64_t n = 0; n < 3; ++n) pool.validate_tx(test::make_tx(n + 1, 1, n, 5));
  const auto genesis = make_genesis();
  const Millis t = 30000;  // step 10, leader sealers[1]
  auto block = aura_propose(NodeId{1}, t, pool, cfg, *genesis);
  ASSERT_TRUE(block);
  EXPECT_EQ(block->txs().size(), 3U);
  EXPECT_EQ(block->header().difficulty, 2U);
  EXPECT_EQ(block->header().timestamp, t);
  EXPECT_EQ(block->number(), 1U);
  EXPECT_EQ(block->header().parent, genesis->id());
  EXPECT_EQ(aura_propose(NodeId{2}, t, pool, cfg, *genesis), nullptr);
}

TEST(Aura, LeaderProposesEvenWithEmptyPool) {
  const auto cfg = config(9);
  Mempool pool;
  auto block = aura_propose(NodeId{1}, 30000, pool, cfg, *make_genesis());
  ASSERT_TRUE(block);
  EXPECT_TRUE(block->txs().empty());
  EXPECT_EQ(block->header().difficulty, 2U);
}

TEST(Aura, VerifyCouplesDifficultyToIdentity) {
  const auto cfg = config(9);
  const auto g = make_genesis();
  EXPECT_TRUE(aura_verify(*test::child_of(*g, 1, 2, 30000), cfg));
  EXPECT_FALSE(aura_verify(*test::child_of(*g, 2, 2, 30000), cfg));
  EXPECT_FALSE(aura_verify(*test::child_of(*g, 2, 1, 30000), cfg));
}

// All sealers at one step and every claimed difficulty: only (leader, 2)
// verifies.
TEST(Aura, VerifyEnumerationAtOneStep) {
  const auto cfg = config(9);
  const auto g = make_genesis();
  const Millis t = 7 * 3000 + 100;
  for (std::uint32_t s = 0; s < 9; ++s) {
    for (std::uint32_t d = 0; d <= 3; ++d) {
      const bool ok = aura_verify(*test::child_of(*g, s, d, t), cfg);
      EXPECT_EQ(ok, s == 7 && d == 2) << "sealer " << s << " difficulty " << d;
      if (ok) {
        EXPECT_EQ(aura_leader(aura_step(t, cfg), cfg), NodeId{s});
      }
    }
  }
}

TEST(Aura, AcceptNeedsStrictMajorityOfDistinctVoters) {
  const auto cfg = config(9);
  const BlockId b{42};
  std::vector<Vote> votes;
  for (std::uint32_t v = 0; v < 4; ++v) votes.push_back({NodeId{v}, b});
  EXPECT_FALSE(aura_accept(votes, b, cfg));
  votes.push_back({NodeId{4}, b});
  EXPECT_TRUE(aura_accept(votes, b, cfg));

  std::vector<Vote> same(9, Vote{NodeId{3}, b});
  EXPECT_FALSE(aura_accept(same, b, cfg));

  std::vector<Vote> other;
  for (std::uint32_t v = 0; v < 9; ++v) other.push_back({NodeId{v}, BlockId{7}});
  EXPECT_FALSE(aura_accept(other, b, cfg));

  std::vector<Vote> outsiders;
  for (std::uint32_t v = 100; v < 110; ++v) outsiders.push_back({NodeId{v}, b});
  EXPECT_FALSE(aura_accept(outsiders, b, cfg));
}

TEST(Aura, ValidateRejectsBadConfig) {
  EXPECT_THROW(validate(config(9, 0)), std::invalid_argument);
  AuraConfig empty;
  EXPECT_THROW(validate(empty), std::invalid_argument);
  EXPECT_THROW(Committee({NodeId{1}, NodeId{1}}), std::invalid_argument);
  EXPECT_THROW(Committee(std::vector<NodeId>{}), std::invalid_argument);
}

}  // namespace
}  // namespace poa
