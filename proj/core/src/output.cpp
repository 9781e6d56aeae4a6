#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <system_error>
#include <tuple>

#include "poa/harness.hpp"

namespace poa {

namespace {

std::string fmt_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

char panel_for(Consensus c, bool by_size, bool rates) {
  const bool aura = c == Consensus::Aura;
  if (!by_size) return aura ? (rates ? 'b' : 'a') : (rates ? 'd' : 'c');
  return aura ? (rates ? 'f' : 'e') : (rates ? 'h' : 'g');
}

double ratio(std::uint64_t a, std::uint64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

std::vector<PanelRow> victim_panels(std::span<const RunResult> timeline_runs, std::span<const SweepRow> size_rows) {
  std::vector<PanelRow> rows;
  for (const auto& run : timeline_runs) {
    const Consensus c = run.config.consensus;
    if (c != Consensus::Aura && c != Consensus::Clique) continue;
    const std::string attack = to_string(run.config.attack);
    const std::string name = to_string(c);
    for (const auto& p : run.series) {
      const auto sent = static_cast<double>(p.sent_txs);
      const auto blocks = static_cast<double>(p.canonical_blocks);
      rows.push_back({std::string(1, panel_for(c, false, false)), name, attack + ".victim_txs", sent,
                      static_cast<double>(p.victim_txs)});
      rows.push_back({std::string(1, panel_for(c, false, false)), name, attack + ".victim_blocks", blocks,
                      static_cast<double>(p.victim_blocks)});
      rows.push_back({std::string(1, panel_for(c, false, true)), name, attack + ".rate_tx", sent,
                      ratio(p.victim_txs, p.confirmed_txs)});
      rows.push_back({std::string(1, panel_for(c, false, true)), name, attack + ".rate_block", blocks,
                      ratio(p.victim_blocks, p.canonical_blocks)});
    }
  }
  for (const auto& row : size_rows) {
    const Consensus c = row.consensus;
    if ((c != Consensus::Aura && c != Consensus::Clique) || row.runs.empty()) continue;
    const std::string attack = to_string(row.attack);
    const std::string name = to_string(c);
    const auto x = static_cast<double>(row.committee);
    double vtx = 0;
    double vblk = 0;
    for (const auto& r : row.runs) {
      vtx += static_cast<double>(r.metrics.victim_txs);
      vblk += static_cast<double>(r.metrics.victim_blocks);
    }
    const auto k = static_cast<double>(row.runs.size());
    rows.push_back({std::string(1, panel_for(c, true, false)), name, attack + ".victim_txs", x, vtx / k});
    rows.push_back({std::string(1, panel_for(c, true, false)), name, attack + ".victim_blocks", x, vblk / k});
    rows.push_back({std::string(1, panel_for(c, true, true)), name, attack + ".rate_tx", x, row.mean_rate_tx()});
    rows.push_back({std::string(1, panel_for(c, true, true)), name, attack + ".rate_block", x, row.mean_rate_block()});
  }
  return rows;
}

std::string format_csv_row(const RunResult& run) {
  const auto& m = run.metrics;
  std::string out;
  out += to_string(run.config.consensus);
  out += ',' + std::to_string(run.config.committee_size);
  out += ',' + std::to_string(run.config.seed);
  out += ',';
  out += to_string(run.config.attack);
  out += ',' + std::to_string(m.canonical_blocks);
  out += ',' + std::to_string(m.victim_blocks);
  out += ',' + std::to_string(m.confirmed_txs);
  out += ',' + std::to_string(m.victim_txs);
  out += ',' + fmt_rate(m.rate_block);
  out += ',' + fmt_rate(m.rate_tx);
  out += ',' + std::to_string(m.stall_ms);
  return out;
}

void write_results_csv(std::ostream& out, std::span<const RunResult> runs) {
  std::vector<const RunResult*> sorted;
  for (const auto& r : runs) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunResult* a, const RunResult* b) {
    return std::make_tuple(a->config.consensus, a->config.committee_size, a->config.seed, a->config.attack) <
           std::make_tuple(b->config.consensus, b->config.committee_size, b->config.seed, b->config.attack);
  });
  out << kCsvHeader << '\n';
  for (const auto* r : sorted) out << format_csv_row(*r) << '\n';
}

void write_panels_csv(std::ostream& out, std::vector<PanelRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const PanelRow& a, const PanelRow& b) {
    return std::tie(a.panel, a.x, a.consensus, a.series) < std::tie(b.panel, b.x, b.consensus, b.series);
  });
  out << "panel,consensus,series,x,y\n";
  for (const auto& r : rows) out << r.panel << ',' << r.consensus << ',' << r.series << ',' << fmt_num(r.x) << ',' << fmt_num(r.y) << '\n';
}

void emit_results(const std::filesystem::path& dir, const std::string& name, std::span<const RunResult> runs,
                  const std::vector<PanelRow>& panels) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw OutputError("write failed: " + path.string());
  };
  write(dir / (name + ".csv"), [&](std::ostream& out) { write_results_csv(out, runs); });
  if (!panels.empty()) write(dir / "panels.csv", [&](std::ostream& out) { write_panels_csv(out, panels); });
}

}  // namespace poa
