#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "poa/harness.hpp"

namespace poa {

const char* to_string(Consensus c) {
  switch (c) {
    case Consensus::Aura: return "aura";
    case Consensus::Clique: return "clique";
    case Consensus::CliquePatched: return "clique-patched";
    case Consensus::Hpb: return "hpb";
    case Consensus::Vrf: return "vrf";
  }
  return "?";
}

const char* to_string(AttackScenario a) {
  switch (a) {
    case AttackScenario::None: return "none";
    case AttackScenario::Type1: return "type1";
    case AttackScenario::Type2: return "type2";
    case AttackScenario::Hybrid: return "hybrid";
  }
  return "?";
}

std::optional<Consensus> parse_consensus(std::string_view s) {
  for (auto c : {Consensus::Aura, Consensus::Clique, Consensus::CliquePatched, Consensus::Hpb, Consensus::Vrf})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

std::optional<AttackScenario> parse_attack(std::string_view s) {
  for (auto a : {AttackScenario::None, AttackScenario::Type1, AttackScenario::Type2, AttackScenario::Hybrid})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

AttackConfig ExperimentConfig::attack_config() const {
  AttackConfig a;
  if (attack == AttackScenario::None) return a;
  a.attacker = NodeId{attacker};
  a.target = target;
  a.empty_blocks = empty_blocks;
  a.type1 = (attack == AttackScenario::Type1 || attack == AttackScenario::Hybrid) ? type1_mode : Type1Mode::Off;
  a.type2 = attack == AttackScenario::Type2 || attack == AttackScenario::Hybrid;
  return a;
}

bool ExperimentConfig::sleeps() const {
  switch (leader_sleep) {
    case LeaderSleep::On: return true;
    case LeaderSleep::Off: return false;
    case LeaderSleep::Auto: return attack == AttackScenario::Type2 || attack == AttackScenario::Hybrid;
  }
  return false;
}

std::uint64_t ExperimentConfig::depth() const {
  return confirmation_depth.value_or(default_confirmation_depth(committee_size));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.committee_size == 0) throw ConfigError("sealers must be at least 1");
  if (cfg.period <= 0) throw ConfigError("period_ms must be positive");
  if (cfg.wiggle_unit < 0) throw ConfigError("wiggle_unit_ms must be non-negative");
  if (!(cfg.tx_rate >= 0.0) || !std::isfinite(cfg.tx_rate)) throw ConfigError("tx_rate must be non-negative");
  if (cfg.run_length <= 0) throw ConfigError("run length must be positive");
  if (cfg.attacker >= cfg.committee_size) throw ConfigError("attacker must be a committee member");
  if (cfg.net.min_delay < 0 || cfg.net.min_delay > cfg.net.delta_max)
    throw ConfigError("need 0 <= min_delay_ms <= delta_ms");
  if (cfg.confirmation_depth && *cfg.confirmation_depth == 0) throw ConfigError("confirmation_depth must be positive");
  if (cfg.gas_price_min > cfg.gas_price_max) throw ConfigError("gas_price_min exceeds gas_price_max");
  if (cfg.block_gas_limit < 21'000) throw ConfigError("block_gas_limit below one transaction");
  if (cfg.vrf_threshold && (!(*cfg.vrf_threshold >= 0.0) || *cfg.vrf_threshold > 1.0))
    throw ConfigError("vrf_threshold must lie in [0, 1]");
  if (cfg.vrf_timeout <= 0) throw ConfigError("vrf_timeout_ms must be positive");
  if (cfg.vrf_max_attempts == 0) throw ConfigError("vrf_max_attempts must be positive");
  for (const auto& f : cfg.faults.entries) {
    if (f.node.value >= cfg.committee_size) throw ConfigError("crash entry names an unknown node");
    if (f.crash_at < 0 || (f.recover_at && *f.recover_at <= f.crash_at))
      throw ConfigError("crash entry needs 0 <= crash < recover");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("invalid integer for " + std::string(key) + ": '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string tmp(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(tmp, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tmp.size() || tmp.empty()) throw ConfigError("invalid number for " + std::string(key) + ": '" + tmp + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

TargetRule parse_target(std::string_view v) {
  TargetRule r;
  if (v == "median") return r;
  if (v == "all") {
    r.kind = TargetRule::Kind::All;
    return r;
  }
  if (v.starts_with("above:")) {
    r.kind = TargetRule::Kind::AboveThreshold;
    r.threshold = parse_int<std::uint64_t>("target", v.substr(6));
    return r;
  }
  throw ConfigError("invalid target: '" + std::string(v) + "' (median, all, above:<price>)");
}

std::string format_target(const TargetRule& r) {
  switch (r.kind) {
    case TargetRule::Kind::AboveMedian: return "median";
    case TargetRule::Kind::All: return "all";
    case TargetRule::Kind::AboveThreshold: return "above:" + std::to_string(r.threshold);
  }
  return "median";
}

// node@crash[-recover], comma separated
FaultSchedule parse_faults(std::string_view v) {
  FaultSchedule out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    if (item.empty()) continue;
    const auto at = item.find('@');
    if (at == std::string_view::npos) throw ConfigError("crash entry needs node@crash_ms[-recover_ms]");
    FaultEntry e;
    e.node = NodeId{parse_int<std::uint32_t>("crash", trim(item.substr(0, at)))};
    const std::string_view times = item.substr(at + 1);
    const auto dash = times.find('-');
    e.crash_at = parse_int<Millis>("crash", trim(times.substr(0, dash)));
    if (dash != std::string_view::npos) e.recover_at = parse_int<Millis>("crash", trim(times.substr(dash + 1)));
    out.entries.push_back(e);
  }
  return out;
}

std::string format_faults(const FaultSchedule& f) {
  std::string out;
  for (const auto& e : f.entries) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.node.value) + "@" + std::to_string(e.crash_at);
    if (e.recover_at) out += "-" + std::to_string(*e.recover_at);
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view v = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) throw ConfigError("duplicate key: " + std::string(key));

    if (key == "consensus") {
      auto c = parse_consensus(v);
      if (!c) throw ConfigError("unknown consensus: '" + std::string(v) + "'");
      cfg.consensus = *c;
    } else if (key == "sealers") {
      cfg.committee_size = parse_int<std::size_t>(key, v);
    } else if (key == "period_ms") {
      cfg.period = parse_int<Millis>(key, v);
    } else if (key == "wiggle_unit_ms") {
      cfg.wiggle_unit = parse_int<Millis>(key, v);
    } else if (key == "tx_rate") {
      cfg.tx_rate = parse_double(key, v);
    } else if (key == "minutes") {
      cfg.run_length = static_cast<Millis>(std::llround(parse_double(key, v) * 60'000.0));
    } else if (key == "run_length_ms") {
      cfg.run_length = parse_int<Millis>(key, v);
    } else if (key == "attack") {
      auto a = parse_attack(v);
      if (!a) throw ConfigError("unknown attack: '" + std::string(v) + "'");
      cfg.attack = *a;
    } else if (key == "type1_mode") {
      if (v == "displacement") cfg.type1_mode = Type1Mode::Displacement;
      else if (v == "insertion") cfg.type1_mode = Type1Mode::Insertion;
      else throw ConfigError("unknown type1_mode: '" + std::string(v) + "'");
    } else if (key == "target") {
      cfg.target = parse_target(v);
    } else if (key == "empty_blocks") {
      cfg.empty_blocks = parse_bool(key, v);
    } else if (key == "attacker") {
      cfg.attacker = parse_int<std::uint32_t>(key, v);
    } else if (key == "leader_sleep") {
      if (v == "auto") cfg.leader_sleep = LeaderSleep::Auto;
      else cfg.leader_sleep = parse_bool(key, v) ? LeaderSleep::On : LeaderSleep::Off;
    } else if (key == "crash") {
      cfg.faults = parse_faults(v);
    } else if (key == "delta_ms") {
      cfg.net.delta_max = parse_int<Millis>(key, v);
    } else if (key == "min_delay_ms") {
      cfg.net.min_delay = parse_int<Millis>(key, v);
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, v);
    } else if (key == "confirmation_depth") {
      if (v == "auto") cfg.confirmation_depth.reset();
      else cfg.confirmation_depth = parse_int<std::uint64_t>(key, v);
    } else if (key == "block_gas_limit") {
      cfg.block_gas_limit = parse_int<std::uint64_t>(key, v);
    } else if (key == "gas_price_min") {
      cfg.gas_price_min = parse_int<std::uint64_t>(key, v);
    } else if (key == "gas_price_max") {
      cfg.gas_price_max = parse_int<std::uint64_t>(key, v);
    } else if (key == "aura_votes") {
      cfg.aura_votes = parse_bool(key, v);
    } else if (key == "vrf_threshold") {
      if (v == "auto") cfg.vrf_threshold.reset();
      else cfg.vrf_threshold = parse_double(key, v);
    } else if (key == "vrf_timeout_ms") {
      cfg.vrf_timeout = parse_int<Millis>(key, v);
    } else if (key == "vrf_max_attempts") {
      cfg.vrf_max_attempts = parse_int<std::uint32_t>(key, v);
    } else if (key == "hpb_oracle_seed") {
      if (v == "auto") cfg.hpb_oracle_seed.reset();
      else cfg.hpb_oracle_seed = parse_int<std::uint64_t>(key, v);
    } else {
      throw ConfigError("unknown key: " + std::string(key));
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "consensus=" << to_string(cfg.consensus) << '\n'
     << "sealers=" << cfg.committee_size << '\n'
     << "period_ms=" << cfg.period << '\n'
     << "wiggle_unit_ms=" << cfg.wiggle_unit << '\n'
     << "tx_rate=" << format_double(cfg.tx_rate) << '\n'
     << "run_length_ms=" << cfg.run_length << '\n'
     << "attack=" << to_string(cfg.attack) << '\n'
     << "type1_mode=" << to_string(cfg.type1_mode) << '\n'
     << "target=" << format_target(cfg.target) << '\n'
     << "empty_blocks=" << (cfg.empty_blocks ? "on" : "off") << '\n'
     << "attacker=" << cfg.attacker << '\n'
     << "leader_sleep="
     << (cfg.leader_sleep == LeaderSleep::Auto ? "auto" : cfg.leader_sleep == LeaderSleep::On ? "on" : "off") << '\n'
     << "crash=" << format_faults(cfg.faults) << '\n'
     << "delta_ms=" << cfg.net.delta_max << '\n'
     << "min_delay_ms=" << cfg.net.min_delay << '\n'
     << "seed=" << cfg.seed << '\n'
     << "confirmation_depth=" << (cfg.confirmation_depth ? std::to_string(*cfg.confirmation_depth) : "auto") << '\n'
     << "block_gas_limit=" << cfg.block_gas_limit << '\n'
     << "gas_price_min=" << cfg.gas_price_min << '\n'
     << "gas_price_max=" << cfg.gas_price_max << '\n'
     << "aura_votes=" << (cfg.aura_votes ? "on" : "off") << '\n'
     << "vrf_threshold=" << (cfg.vrf_threshold ? format_double(*cfg.vrf_threshold) : "auto") << '\n'
     << "vrf_timeout_ms=" << cfg.vrf_timeout << '\n'
     << "vrf_max_attempts=" << cfg.vrf_max_attempts << '\n'
     << "hpb_oracle_seed=" << (cfg.hpb_oracle_seed ? std::to_string(*cfg.hpb_oracle_seed) : "auto") << '\n';
  return os.str();
}

}  // namespace poa
