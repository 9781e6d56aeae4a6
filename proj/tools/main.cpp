#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poa/harness.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOutput = 3;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> consensus;
  std::optional<std::string> attack;
  std::optional<std::size_t> sealers;
  std::optional<double> minutes;
  std::optional<std::string> out;
  std::optional<std::string> log;
};

struct SweepArgs {
  std::string experiment;
  std::string out;
  std::optional<std::string> config;
  unsigned seeds{5};
  std::optional<double> minutes;
};

poa::ExperimentConfig apply_overrides(poa::ExperimentConfig cfg, const RunArgs& a) {
  if (a.seed) cfg.seed = *a.seed;
  if (a.consensus) {
    auto c = poa::parse_consensus(*a.consensus);
    if (!c) throw poa::ConfigError("unknown consensus: '" + *a.consensus + "'");
    cfg.consensus = *c;
  }
  if (a.attack) {
    auto s = poa::parse_attack(*a.attack);
    if (!s) throw poa::ConfigError("unknown attack: '" + *a.attack + "'");
    cfg.attack = *s;
  }
  if (a.sealers) cfg.committee_size = *a.sealers;
  if (a.minutes) cfg.run_length = static_cast<poa::Millis>(std::llround(*a.minutes * 60'000.0));
  poa::validate(cfg);
  return cfg;
}

void print_summary(const poa::RunResult& r) {
  const auto& m = r.metrics;
  std::fprintf(stderr,
               "%s n=%zu attack=%s seed=%llu: blocks=%llu victim_blocks=%llu txs=%llu victim_txs=%llu "
               "rate_block=%.4f rate_tx=%.4f stall_ms=%lld contested=%llu/%llu digest=%016llx\n",
               poa::to_string(r.config.consensus), r.config.committee_size, poa::to_string(r.config.attack),
               static_cast<unsigned long long>(r.config.seed), static_cast<unsigned long long>(m.canonical_blocks),
               static_cast<unsigned long long>(m.victim_blocks), static_cast<unsigned long long>(m.confirmed_txs),
               static_cast<unsigned long long>(m.victim_txs), m.rate_block, m.rate_tx,
               static_cast<long long>(m.stall_ms), static_cast<unsigned long long>(m.contested_wins),
               static_cast<unsigned long long>(m.contested_heights), static_cast<unsigned long long>(r.log_digest));
}

int cmd_run(const RunArgs& args) {
  const poa::ExperimentConfig cfg = apply_overrides(poa::load_config(args.config), args);

  std::ofstream log;
  poa::RunOptions options;
  if (args.log) {
    log.open(*args.log);
    if (!log) throw poa::OutputError("cannot write " + *args.log);
    std::istringstream header(poa::format_config(cfg));
    for (std::string line; std::getline(header, line);) log << "# " << line << '\n';
    options.observer = [&log](const poa::EventRecord& rec) { log << poa::format_event(rec) << '\n'; };
  }

  const poa::RunResult result = poa::run_experiment(cfg, options);
  if (log.is_open()) {
    log.flush();
    if (!log) throw poa::OutputError("cannot write " + *args.log);
  }

  const std::vector<poa::RunResult> runs{result};
  if (args.out) {
    poa::emit_results(*args.out, "run", runs);
  } else {
    poa::write_results_csv(std::cout, runs);
  }
  print_summary(result);
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw poa::ConfigError("cannot read " + path);
  std::string header;
  std::vector<std::string> expected;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# ", 0) == 0 && expected.empty()) {
      header += line.substr(2) + '\n';
    } else if (!line.empty()) {
      expected.push_back(line);
    }
  }
  const poa::ExperimentConfig cfg = poa::parse_config(header);

  std::size_t index = 0;
  std::optional<std::size_t> mismatch;
  std::string got;
  poa::RunOptions options;
  options.observer = [&](const poa::EventRecord& rec) {
    if (mismatch) return;
    std::string line = poa::format_event(rec);
    if (index >= expected.size() || line != expected[index]) {
      mismatch = index;
      got = std::move(line);
    }
    ++index;
  };
  poa::run_experiment(cfg, options);

  if (!mismatch && index != expected.size()) mismatch = index;
  if (mismatch) {
    std::fprintf(stderr, "replay diverges at event %zu\n", *mismatch);
    if (*mismatch < expected.size()) std::fprintf(stderr, "  log:    %s\n", expected[*mismatch].c_str());
    else std::fprintf(stderr, "  log:    <end>\n");
    std::fprintf(stderr, "  replay: %s\n", got.empty() ? "<end>" : got.c_str());
    return kExitMismatch;
  }
  std::fprintf(stderr, "replay matches %zu events\n", index);
  return 0;
}

std::vector<std::uint64_t> seed_list(unsigned k) {
  std::vector<std::uint64_t> seeds;
  for (unsigned i = 1; i <= k; ++i) seeds.push_back(i);
  return seeds;
}

std::vector<poa::RunResult> flatten(const std::vector<poa::SweepRow>& rows) {
  std::vector<poa::RunResult> runs;
  for (const auto& row : rows) runs.insert(runs.end(), row.runs.begin(), row.runs.end());
  return runs;
}

void report(const std::vector<poa::SweepRow>& rows) {
  for (const auto& row : rows)
    std::fprintf(stderr, "%-14s %-6s n=%-3zu runs=%zu rate_tx=%.4f rate_block=%.4f victim_blocks=%llu\n",
                 poa::to_string(row.consensus), poa::to_string(row.attack), row.committee, row.runs.size(),
                 row.mean_rate_tx(), row.mean_rate_block(), static_cast<unsigned long long>(row.total_victim_blocks()));
}

int cmd_sweep(const SweepArgs& args) {
  poa::ExperimentConfig base = args.config ? poa::load_config(*args.config) : poa::ExperimentConfig{};
  if (args.minutes) base.run_length = static_cast<poa::Millis>(std::llround(*args.minutes * 60'000.0));
  poa::validate(base);
  if (args.seeds == 0) throw poa::ConfigError("--seeds must be positive");
  const auto seeds = seed_list(args.seeds);

  const std::vector<std::size_t> type1_sizes{3, 9, 18, 27};
  const std::vector<std::size_t> type2_sizes{9, 18, 27, 36};

  if (args.experiment == "type1-committee") {
    std::vector<poa::SweepRow> rows;
    for (poa::Consensus c : {poa::Consensus::Aura, poa::Consensus::Clique}) {
      base.consensus = c;
      auto part = poa::experiment_type1_committee_sweep(type1_sizes, base, seeds);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    report(rows);
    poa::emit_results(args.out, "type1_committee", flatten(rows), poa::victim_panels({}, rows));
    return 0;
  }
  if (args.experiment == "type2-committee") {
    const std::vector<poa::Consensus> variants{poa::Consensus::Aura, poa::Consensus::Clique,
                                               poa::Consensus::CliquePatched, poa::Consensus::Hpb,
                                               poa::Consensus::Vrf};
    auto rows = poa::experiment_type2(type2_sizes, variants, base, seeds);
    report(rows);
    poa::emit_results(args.out, "type2_committee", flatten(rows), poa::victim_panels({}, rows));
    return 0;
  }
  if (args.experiment == "victim-panels") {
    std::vector<poa::ExperimentConfig> timeline;
    for (poa::Consensus c : {poa::Consensus::Aura, poa::Consensus::Clique}) {
      for (poa::AttackScenario a : {poa::AttackScenario::Type1, poa::AttackScenario::Type2,
                                    poa::AttackScenario::Hybrid}) {
        poa::ExperimentConfig cfg = base;
        cfg.consensus = c;
        cfg.attack = a;
        timeline.push_back(cfg);
      }
    }
    const auto timeline_runs = poa::run_batch(timeline);

    std::vector<poa::SweepRow> rows;
    const std::vector<poa::Consensus> variants{poa::Consensus::Aura, poa::Consensus::Clique};
    for (poa::Consensus c : variants) {
      base.consensus = c;
      auto part = poa::experiment_type1_committee_sweep(type2_sizes, base, seeds);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    auto type2 = poa::experiment_type2(type2_sizes, variants, base, seeds);
    rows.insert(rows.end(), type2.begin(), type2.end());
    report(rows);

    auto runs = flatten(rows);
    runs.insert(runs.end(), timeline_runs.begin(), timeline_runs.end());
    poa::emit_results(args.out, "victim_panels", runs, poa::victim_panels(timeline_runs, rows));
    return 0;
  }
  throw poa::ConfigError("unknown experiment: '" + args.experiment + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for ordering attacks on Proof-of-Authority consensus"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one experiment and print or write its CSV row");
  run->add_option("--config", run_args.config, "Config file (flat key = value)")->required();
  run->add_option("--seed", run_args.seed, "Override the master seed");
  run->add_option("--consensus", run_args.consensus, "aura|clique|clique-patched|hpb|vrf");
  run->add_option("--attack", run_args.attack, "none|type1|type2|hybrid");
  run->add_option("--sealers", run_args.sealers, "Committee size");
  run->add_option("--minutes", run_args.minutes, "Simulated run length in minutes");
  run->add_option("--out", run_args.out, "Directory for run.csv");
  run->add_option("--log", run_args.log, "Write the event log to this file");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a committee-size experiment family");
  sweep->add_option("--experiment", sweep_args.experiment, "type1-committee|type2-committee|victim-panels")->required();
  sweep->add_option("--out", sweep_args.out, "Output directory")->required();
  sweep->add_option("--config", sweep_args.config, "Base config file");
  sweep->add_option("--seeds", sweep_args.seeds, "Seeds 1..K per cell")->capture_default_str();
  sweep->add_option("--minutes", sweep_args.minutes, "Simulated run length in minutes");

  std::string replay_log;
  auto* replay = app.add_subcommand("replay", "Re-run a logged experiment and compare event by event");
  replay->add_option("--log", replay_log, "Event log written by run --log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*replay) return cmd_replay(replay_log);
  } catch (const poa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const poa::OutputError& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
