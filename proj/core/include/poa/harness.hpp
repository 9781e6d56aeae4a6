#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "poa/adversary.hpp"
#include "poa/chain_store.hpp"
#include "poa/committee.hpp"
#include "poa/netsim.hpp"
#include "poa/types.hpp"

namespace poa {

enum class Consensus : std::uint8_t { Aura, Clique, CliquePatched, Hpb, Vrf };
enum class AttackScenario : std::uint8_t { None, Type1, Type2, Hybrid };
enum class LeaderSleep : std::uint8_t { Auto, On, Off };

const char* to_string(Consensus c);
const char* to_string(AttackScenario a);
std::optional<Consensus> parse_consensus(std::string_view s);
std::optional<AttackScenario> parse_attack(std::string_view s);

struct ExperimentConfig {
  Consensus consensus{Consensus::Clique};
  std::size_t committee_size{9};
  Millis period{3000};
  Millis wiggle_unit{500};
  double tx_rate{10.0};
  Millis run_length{40 * 60 * 1000};
  AttackScenario attack{AttackScenario::None};
  Type1Mode type1_mode{Type1Mode::Displacement};
  TargetRule target;
  bool empty_blocks{false};
  std::uint32_t attacker{0};
  /// Honest in-turn sealers stay silent at their own heights (the attacker
  /// keeps its turns). Auto enables it for type2 and hybrid.
  LeaderSleep leader_sleep{LeaderSleep::Auto};
  FaultSchedule faults;
  NetworkModel net;
  std::uint64_t seed{1};
  /// N/2 + 1 when unset.
  std::optional<std::uint64_t> confirmation_depth;
  std::uint64_t block_gas_limit{kDefaultBlockGasLimit};
  std::uint64_t gas_price_min{1};
  std::uint64_t gas_price_max{100};
  bool aura_votes{true};
  std::optional<double> vrf_threshold;
  Millis vrf_timeout{3000};
  std::uint32_t vrf_max_attempts{64};
  /// Oracle seed for the hardware rotation; derived from `seed` when unset.
  std::optional<std::uint64_t> hpb_oracle_seed;

  AttackConfig attack_config() const;
  bool sleeps() const;
  std::uint64_t depth() const;
  Committee committee() const { return Committee::of_size(committee_size); }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Flat `key = value` text, `#` starts a comment. Unknown keys, bad values,
/// and duplicates throw ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
/// Every field, one `key=value` per line, readable by `parse_config`.
std::string format_config(const ExperimentConfig& cfg);

/// Shared bookkeeping written by nodes while a run executes.
struct RunJournal {
  std::map<BlockId, Millis> sealed_at;
  /// Parents on which the attacker armed a zero-delay edge plan.
  std::set<BlockId> frontrun_parents;
  std::uint64_t verify_calls{0};
  std::uint64_t rejected_blocks{0};
  std::uint64_t attacker_blocks_sent{0};
  std::uint64_t attacker_blocks_rejected{0};
  std::uint64_t votes_sent{0};
};

struct Metrics {
  std::uint64_t total_blocks{0};
  std::uint64_t canonical_blocks{0};
  std::uint64_t victim_blocks{0};
  std::uint64_t confirmed_txs{0};
  std::uint64_t victim_txs{0};
  std::uint64_t attacker_sealed_blocks{0};
  std::uint64_t attacker_txs{0};
  std::vector<std::uint64_t> per_sealer;
  double rate_block{0.0};
  double rate_tx{0.0};
  Millis stall_ms{0};
  std::uint64_t contested_heights{0};
  std::uint64_t contested_wins{0};
  std::uint64_t sent_txs{0};
  std::uint64_t verify_calls{0};
  std::uint64_t rejected_blocks{0};
  std::uint64_t attacker_blocks_rejected{0};
  std::uint64_t attacker_blocks_sent{0};
  /// Attacker blocks that fail the rules (the attacker broadcasts them anyway).
  std::uint64_t attacker_invalid_blocks{0};
  /// Honest stores that took in one of those blocks; 0 when all verifiers refuse.
  std::uint64_t attacker_invalid_accepted{0};

  double contested_win_rate() const {
    return contested_heights == 0 ? 0.0 : static_cast<double>(contested_wins) / static_cast<double>(contested_heights);
  }
};

/// Decides whether an attacker difficulty-1 block took the height from an
/// honest sealer with priority. `chain[i]` is the canonical block at height i.
using FrontrunJudge = std::function<bool(const Block& block, std::span<const BlockPtr> chain)>;

/// Victim counting over canonical blocks genesis..cut (genesis first):
/// a victim transaction is a user transaction preceded by an AttackerFront in
/// its block; a victim block is an attacker difficulty-1 block while Type-II
/// is on, restricted by `judge` when given.
Metrics count_victims(std::span<const BlockPtr> confirmed, const AttackConfig& attack,
                      const FrontrunJudge& judge = {});

struct SeriesPoint {
  Millis t{0};
  std::uint64_t sent_txs{0};
  std::uint64_t confirmed_txs{0};
  std::uint64_t victim_txs{0};
  std::uint64_t canonical_blocks{0};
  std::uint64_t victim_blocks{0};
};

struct RunResult {
  ExperimentConfig config;
  Metrics metrics;
  /// Cumulative counts at the end of every 2-minute bucket.
  std::vector<SeriesPoint> series;
  /// Stall per confirmed height (index = height).
  std::vector<Millis> stall_by_height;
  std::uint64_t log_digest{0};
  std::uint64_t events{0};
  /// Honest node whose chain the metrics were read from.
  NodeId reference;
  std::vector<BlockPtr> confirmed;
};

struct RunOptions {
  /// Invoked for every executed event.
  std::function<void(const EventRecord&)> observer;
};

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Runs independent configs on up to `workers` threads (hardware concurrency
/// when 0). Results keep input order; chains are dropped unless `keep_chains`.
std::vector<RunResult> run_batch(std::span<const ExperimentConfig> cfgs, unsigned workers = 0,
                                 bool keep_chains = false);

constexpr Millis kBucketWidth = 2 * 60 * 1000;

struct SweepRow {
  Consensus consensus{};
  AttackScenario attack{};
  std::size_t committee{0};
  std::vector<RunResult> runs;

  double mean_rate_tx() const;
  double mean_rate_block() const;
  double mean_contested_win_rate() const;
  std::uint64_t total_victim_blocks() const;
};

/// One row per size, Type-I only, faultless.
std::vector<SweepRow> experiment_type1_committee_sweep(std::span<const std::size_t> sizes,
                                                       const ExperimentConfig& base,
                                                       std::span<const std::uint64_t> seeds);

/// One row per (consensus, size, attack) with attack in {type2, hybrid}.
std::vector<SweepRow> experiment_type2(std::span<const std::size_t> sizes, std::span<const Consensus> variants,
                                       const ExperimentConfig& base, std::span<const std::uint64_t> seeds);

/// Rows of `panels.csv`: panel, consensus, series, x, y.
struct PanelRow {
  std::string panel;
  std::string consensus;
  std::string series;
  double x{0.0};
  double y{0.0};
};

std::vector<PanelRow> victim_panels(std::span<const RunResult> timeline_runs, std::span<const SweepRow> size_rows);

inline constexpr const char* kCsvHeader =
    "consensus,committee,seed,attack,canonical_blocks,victim_blocks,confirmed_txs,victim_txs,rate_block,rate_tx,"
    "stall_ms";

std::string format_csv_row(const RunResult& run);
void write_results_csv(std::ostream& out, std::span<const RunResult> runs);
void write_panels_csv(std::ostream& out, std::vector<PanelRow> rows);

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `<dir>/<name>.csv` and, when panels are given, `<dir>/panels.csv`.
/// Throws OutputError when the directory cannot be created or written.
void emit_results(const std::filesystem::path& dir, const std::string& name, std::span<const RunResult> runs,
                  const std::vector<PanelRow>& panels = {});

}  // namespace poa
