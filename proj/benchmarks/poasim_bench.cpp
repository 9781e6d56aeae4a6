#include <benchmark/benchmark.h>

#include <random>

#include "poa/chain_store.hpp"
#include "poa/harness.hpp"
#include "poa/mempool.hpp"

namespace {

using namespace poa;

Transaction tx_of(std::mt19937_64& rng, std::uint64_t id, std::uint32_t sender, std::uint64_t nonce) {
  Transaction tx;
  tx.id = TxId{id};
  tx.sender = AccountId{sender};
  tx.nonce = nonce;
  tx.gas_price = 1 + rng() % 100;
  tx.arrival_time = static_cast<Millis>(rng() % 3000);
  return tx;
}

void BM_HonestOrder(benchmark::State& state) {
  std::mt19937_64 rng(1);
  Mempool pool;
  for (std::int64_t i = 0; i < state.range(0); ++i)
    pool.validate_tx(tx_of(rng, static_cast<std::uint64_t>(i + 1), static_cast<std::uint32_t>(i), 0));
  for (auto _ : state) benchmark::DoNotOptimize(pool.honest_order());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HonestOrder)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MempoolChurn(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uint64_t id = 1;
  for (auto _ : state) {
    Mempool pool;
    std::vector<Transaction> txs;
    for (std::uint32_t s = 0; s < 64; ++s)
      for (std::uint64_t n = 0; n < 16; ++n) txs.push_back(tx_of(rng, id++, s, n));
    for (const auto& tx : txs) pool.validate_tx(tx);
    for (const auto& tx : txs) pool.note_included(tx);
    benchmark::DoNotOptimize(pool.size());
  }
  state.SetItemsProcessed(state.iterations() * 64 * 16);
}
BENCHMARK(BM_MempoolChurn);

// Insertion into a store whose branches fork every few heights.
void BM_ForkChoiceInsert(benchmark::State& state) {
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    state.PauseTiming();
    ChainStore store;
    std::vector<BlockPtr> tips{store.canonical_chain()[0]};
    state.ResumeTiming();
    for (std::int64_t i = 0; i < state.range(0); ++i) {
      const auto& parent = tips[rng() % tips.size()];
      BlockHeader h;
      h.number = parent->number() + 1;
      h.parent = parent->id();
      h.sealer = NodeId{static_cast<std::uint32_t>(rng() % 9)};
      h.difficulty = 1 + static_cast<std::uint32_t>(rng() % 2);
      h.timestamp = parent->header().timestamp + 3000;
      auto b = make_block(h, {});
      store.insert_block(b, static_cast<Millis>(i));
      if (tips.size() < 4) tips.push_back(b);
      else tips[rng() % tips.size()] = b;
    }
    benchmark::DoNotOptimize(store.tip());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForkChoiceInsert)->Arg(1000)->Arg(10000);

// Whole runs: events per second through the loop.
void BM_Run(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.consensus = static_cast<Consensus>(state.range(0));
  cfg.attack = AttackScenario::Type2;
  cfg.committee_size = 9;
  cfg.run_length = 10 * 60 * 1000;
  std::uint64_t events = 0;
  for (auto _ : state) {
    const auto r = run_experiment(cfg);
    events += r.events;
    benchmark::DoNotOptimize(r.metrics.canonical_blocks);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
  state.SetLabel(to_string(cfg.consensus));
}
BENCHMARK(BM_Run)
    ->Arg(static_cast<int>(Consensus::Clique))
    ->Arg(static_cast<int>(Consensus::Aura))
    ->Arg(static_cast<int>(Consensus::Vrf))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
