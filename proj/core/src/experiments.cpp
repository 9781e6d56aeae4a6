#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "nodes.hpp"
#include "poa/harness.hpp"

namespace poa {

namespace {

bool down_at(const FaultSchedule& faults, NodeId node, Millis t) {
  return std::any_of(faults.entries.begin(), faults.entries.end(), [&](const FaultEntry& e) {
    return e.node == node && e.crash_at <= t && (!e.recover_at || t < *e.recover_at);
  });
}

RecentSigners window_from_chain(std::span<const BlockPtr> chain, std::uint64_t height, const CliqueConfig& cfg) {
  RecentSigners w;
  const std::uint64_t limit = recent_window_length(cfg.sealers.size());
  const std::uint64_t first = height > limit ? height - limit : 1;
  for (std::uint64_t h = first; h < height && h < chain.size(); ++h) w.entries.emplace_back(h, chain[h]->sealer());
  return w;
}

/// Honest sealer with priority over the attacker for this height.
bool displaced_honest(const Block& b, std::span<const BlockPtr> chain, const detail::NodeEnv& env) {
  const std::uint64_t h = b.number();
  const std::size_t n = env.committee.size();
  const std::size_t attacker = env.attack.attacker.value;
  const Millis t = b.header().timestamp;
  switch (env.cfg.consensus) {
    case Consensus::Vrf: return false;
    case Consensus::Hpb: {
      const std::size_t miner = hpb_calc_miner(h, env.oracle.sample(h), n);
      return miner != attacker && !down_at(env.cfg.faults, env.committee.at(miner), t);
    }
    default: break;
  }
  const RecentSigners window = window_from_chain(chain, h, env.clique);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t idx = (h + k) % n;
    if (idx == attacker) return false;
    const NodeId s = env.committee.at(idx);
    if (!sign_recently(s, h, window, env.clique) && !down_at(env.cfg.faults, s, t)) return true;
  }
  return false;
}

void count_contested(std::span<const BlockPtr> chain, const detail::NodeEnv& env, Metrics& m) {
  if (!env.attack.active()) return;
  if (env.cfg.consensus == Consensus::Aura || env.cfg.consensus == Consensus::Vrf) return;
  const std::size_t n = env.committee.size();
  const NodeId attacker = env.attack.attacker;
  for (std::size_t h = 1; h < chain.size(); ++h) {
    const Block& parent = *chain[h - 1];
    const std::size_t in_turn = env.cfg.consensus == Consensus::Hpb
                                    ? hpb_in_turn_index(env.oracle.sample(h), n)
                                    : static_cast<std::size_t>(h % n);
    const NodeId leader = env.committee.at(in_turn);
    if (leader == attacker) continue;
    const bool leader_down =
        env.sleeps || down_at(env.cfg.faults, leader, parent.header().timestamp + env.cfg.period);
    if (!leader_down) continue;
    if (!env.journal.frontrun_parents.contains(parent.id())) continue;
    ++m.contested_heights;
    if (chain[h]->sealer() == attacker) ++m.contested_wins;
  }
}

Millis deadline_for(const Block& parent, const detail::NodeEnv& env) {
  const Millis delta = env.cfg.net.delta_max;
  Millis sealed = parent.header().timestamp;
  if (auto it = env.journal.sealed_at.find(parent.id()); it != env.journal.sealed_at.end()) sealed = it->second;
  const Millis base = std::max(sealed + delta, parent.header().timestamp + env.cfg.period);
  switch (env.cfg.consensus) {
    case Consensus::Aura: return base + 3 * delta;
    case Consensus::Vrf: return base + delta;
    default: return base + wiggle_bound(env.clique) + delta;
  }
}

NodeId pick_reference(const Simulator& sim, const detail::NodeEnv& env) {
  auto candidates = [&](bool skip_faulty) {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < sim.node_count(); ++i) {
      const NodeId id{i};
      if (env.attack.active() && id == env.attack.attacker) continue;
      const bool faulty = std::any_of(env.cfg.faults.entries.begin(), env.cfg.faults.entries.end(),
                                      [&](const FaultEntry& e) { return e.node == id; });
      if (skip_faulty && faulty) continue;
      out.push_back(id);
    }
    return out;
  };
  auto ids = candidates(true);
  if (ids.empty()) ids = candidates(false);
  if (ids.empty()) return NodeId{0};
  NodeId best = ids.front();
  for (NodeId id : ids) {
    const auto* a = sim.node(id).chain();
    const auto* b = sim.node(best).chain();
    if (a->tip_entry().score > b->tip_entry().score) best = id;
  }
  return best;
}

std::vector<SeriesPoint> build_series(std::span<const BlockPtr> confirmed, const std::vector<Transaction>& injected,
                                      const AttackConfig& attack, Millis run_length, const FrontrunJudge& judge) {
  std::vector<SeriesPoint> out;
  std::size_t tx_i = 0;
  std::size_t blk_i = 1;
  SeriesPoint acc;
  for (Millis t = kBucketWidth;; t += kBucketWidth) {
    const Millis end = std::min(t, run_length);
    for (; tx_i < injected.size() && injected[tx_i].arrival_time < end; ++tx_i) ++acc.sent_txs;
    for (; blk_i < confirmed.size() && confirmed[blk_i]->header().timestamp < end; ++blk_i) {
      const Block& b = *confirmed[blk_i];
      ++acc.canonical_blocks;
      bool fronted = false;
      for (const auto& tx : b.txs()) {
        if (tx.kind == TxKind::AttackerFront) fronted = true;
        if (tx.kind != TxKind::User) continue;
        ++acc.confirmed_txs;
        if (fronted) ++acc.victim_txs;
      }
      if (attack.active() && attack.type2 && b.sealer() == attack.attacker && b.header().difficulty == 1 &&
          (!judge || judge(b, confirmed)))
        ++acc.victim_blocks;
    }
    acc.t = end;
    out.push_back(acc);
    if (end >= run_length) break;
  }
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  validate(cfg);
  detail::NodeEnv env(cfg);

  SimConfig sc;
  sc.net = cfg.net;
  sc.faults = cfg.faults;
  sc.workload.tx_rate = cfg.tx_rate;
  sc.workload.run_length = cfg.run_length;
  sc.workload.gas_price_min = cfg.gas_price_min;
  sc.workload.gas_price_max = cfg.gas_price_max;
  sc.seed = cfg.seed;
  sc.until = cfg.run_length;
  Simulator sim(sc);
  for (std::uint32_t i = 0; i < cfg.committee_size; ++i) sim.add_node(detail::make_node(NodeId{i}, env));
  if (options.observer) sim.set_observer(options.observer);
  sim.run();

  RunResult r;
  r.config = cfg;
  r.reference = pick_reference(sim, env);
  const ChainStore& ref = *sim.node(r.reference).chain();
  r.confirmed = confirmed_blocks(ref, cfg.depth());
  const std::span<const BlockPtr> chain(r.confirmed);

  FrontrunJudge judge = [&env](const Block& b, std::span<const BlockPtr> c) { return displaced_honest(b, c, env); };
  r.metrics = count_victims(chain, env.attack, judge);
  r.metrics.per_sealer.resize(cfg.committee_size, 0);
  r.metrics.total_blocks = ref.size() - 1;
  r.metrics.sent_txs = sim.injected().size();
  r.metrics.verify_calls = env.journal.verify_calls;
  r.metrics.rejected_blocks = env.journal.rejected_blocks;
  r.metrics.attacker_blocks_rejected = env.journal.attacker_blocks_rejected;
  r.metrics.attacker_blocks_sent = env.journal.attacker_blocks_sent;
  for (const auto& [id, fate] : env.attacker_blocks) {
    if (fate.self_valid) continue;
    ++r.metrics.attacker_invalid_blocks;
    r.metrics.attacker_invalid_accepted += fate.accepted_by;
  }
  count_contested(chain, env, r.metrics);

  r.stall_by_height.assign(r.confirmed.size(), 0);
  for (std::size_t h = 1; h < r.confirmed.size(); ++h) {
    const Millis arrival = ref.find(r.confirmed[h]->id())->arrival;
    const Millis stall = std::max<Millis>(0, arrival - deadline_for(*r.confirmed[h - 1], env));
    r.stall_by_height[h] = stall;
    r.metrics.stall_ms += stall;
  }

  r.series = build_series(chain, sim.injected(), env.attack, cfg.run_length, judge);
  r.log_digest = sim.log_digest();
  r.events = sim.executed_events();
  return r;
}

}  // namespace poa

namespace poa {

namespace {

template <typename F>
double mean_of(const std::vector<RunResult>& runs, F f) {
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : runs) sum += f(r);
  return sum / static_cast<double>(runs.size());
}

SweepRow run_row(ExperimentConfig cfg, std::span<const std::uint64_t> seeds) {
  SweepRow row;
  row.consensus = cfg.consensus;
  row.attack = cfg.attack;
  row.committee = cfg.committee_size;
  std::vector<ExperimentConfig> cfgs;
  for (std::uint64_t seed : seeds) {
    cfg.seed = seed;
    cfgs.push_back(cfg);
  }
  row.runs = run_batch(cfgs);
  return row;
}

}  // namespace

std::vector<RunResult> run_batch(std::span<const ExperimentConfig> cfgs, unsigned workers, bool keep_chains) {
  std::vector<RunResult> out(cfgs.size());
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfgs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        out[i] = run_experiment(cfgs[i]);
        if (!keep_chains) out[i].confirmed.clear();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double SweepRow::mean_rate_tx() const {
  return mean_of(runs, [](const RunResult& r) { return r.metrics.rate_tx; });
}

double SweepRow::mean_rate_block() const {
  return mean_of(runs, [](const RunResult& r) { return r.metrics.rate_block; });
}

double SweepRow::mean_contested_win_rate() const {
  return mean_of(runs, [](const RunResult& r) { return r.metrics.contested_win_rate(); });
}

std::uint64_t SweepRow::total_victim_blocks() const {
  std::uint64_t sum = 0;
  for (const auto& r : runs) sum += r.metrics.victim_blocks;
  return sum;
}

std::vector<SweepRow> experiment_type1_committee_sweep(std::span<const std::size_t> sizes,
                                                       const ExperimentConfig& base,
                                                       std::span<const std::uint64_t> seeds) {
  std::vector<SweepRow> rows;
  for (std::size_t n : sizes) {
    ExperimentConfig cfg = base;
    cfg.committee_size = n;
    cfg.attack = AttackScenario::Type1;
    cfg.faults = {};
    cfg.attacker = std::min<std::uint32_t>(cfg.attacker, static_cast<std::uint32_t>(n - 1));
    rows.push_back(run_row(cfg, seeds));
  }
  return rows;
}

std::vector<SweepRow> experiment_type2(std::span<const std::size_t> sizes, std::span<const Consensus> variants,
                                       const ExperimentConfig& base, std::span<const std::uint64_t> seeds) {
  std::vector<SweepRow> rows;
  for (Consensus c : variants) {
    for (std::size_t n : sizes) {
      for (AttackScenario a : {AttackScenario::Type2, AttackScenario::Hybrid}) {
        ExperimentConfig cfg = base;
        cfg.consensus = c;
        cfg.committee_size = n;
        cfg.attack = a;
        cfg.attacker = std::min<std::uint32_t>(cfg.attacker, static_cast<std::uint32_t>(n - 1));
        rows.push_back(run_row(cfg, seeds));
      }
    }
  }
  return rows;
}

}  // namespace poa
