#include "poa/remedies.hpp"


#include "poa/digest.hpp"

namespace poa {

std::optional<NodeId> expected_edge_sealer(std::uint64_t number, const CliqueConfig& cfg,
                                           const RecentSigners& window) {
  const std::size_t n = cfg.sealers.size();
  for (std::size_t k = 1; k < n; ++k) {
    const NodeId candidate = cfg.sealers.at((number + k) % n);
    if (!sign_recently(candidate, number, window, cfg)) return candidate;
  }
  return std::nullopt;
}

bool clique_verify_patched(const Block& block, const CliqueConfig& cfg, const RecentSigners& window) {
  if (!clique_verify(block, cfg, window)) return false;
  if (block.header().difficulty != 1) return true;
  const auto expected = expected_edge_sealer(block.number(), cfg, window);
  return expected && *expected == block.sealer();
}

std::uint64_t HardwareOracle::sample(std::uint64_t round) const {
  Sha256 h;
  h.update("hardware-oracle");
  h.update_u64(seed_);
  h.update_u64(round);
  return digest_prefix_u64(h.finish());
}

std::size_t hpb_in_turn_index(std::uint64_t trace, std::size_t committee_size) {
  return static_cast<std::size_t>((trace % committee_size + 1) % committee_size);
}

std::size_t hpb_calc_miner(std::uint64_t number, std::uint64_t tag, std::size_t committee_size) {
  const std::uint64_t n = committee_size;
  auto miner = static_cast<std::size_t>((tag % n + number % n) % n);
  if (committee_size > 1 && miner == hpb_in_turn_index(tag, committee_size)) miner = (miner + 1) % committee_size;
  return miner;
}

std::optional<SealPlan> hpb_plan(NodeId sealer, Millis now, const HardwareOracle& oracle, const HpbConfig& cfg,
                                 const Block& tip, Rng& rng) {
  const auto index = cfg.clique.sealers.index_of(sealer);
  if (!index) return std::nullopt;
  const std::uint64_t next = tip.number() + 1;
  const std::uint64_t trace = oracle.sample(next);
  const Millis scheduled = clique_scheduled_time(tip, cfg.clique);

  SealPlan plan;
  plan.number = next;
  plan.parent = tip.id();
  plan.sealer = sealer;
  plan.timestamp = std::max(scheduled, now);
  if (*index == hpb_in_turn_index(trace, cfg.clique.sealers.size())) {
    plan.difficulty = 2;
    plan.send_at = plan.timestamp;
  } else {
    plan.difficulty = 1;
    plan.send_at = now + wiggle_delay(cfg.clique, rng, now, scheduled);
  }
  return plan;
}

BlockPtr hpb_seal(const SealPlan& plan, std::uint64_t trace, std::vector<Transaction> txs) {
  BlockHeader h;
  h.number = plan.number;
  h.parent = plan.parent;
  h.sealer = plan.sealer;
  h.difficulty = plan.difficulty;
  h.timestamp = plan.timestamp;
  h.hardware_trace = trace;
  return make_block(std::move(h), std::move(txs));
}

const char* to_string(HpbVerdict verdict) {
  switch (verdict) {
    case HpbVerdict::Ok: return "ok";
    case HpbVerdict::MissingTrace: return "missing-trace";
    case HpbVerdict::OracleMismatch: return "oracle-mismatch";
    case HpbVerdict::BadDifficulty: return "bad-difficulty";
    case HpbVerdict::WrongMiner: return "wrong-miner";
    case HpbVerdict::NotMember: return "not-member";
  }
  return "?";
}

HpbVerdict hpb_check(const Block& block, const HardwareOracle& oracle, const HpbConfig& cfg) {
  const auto& h = block.header();
  const auto index = cfg.clique.sealers.index_of(h.sealer);
  if (!index) return HpbVerdict::NotMember;
  if (!h.hardware_trace) return HpbVerdict::MissingTrace;
  const std::uint64_t tag = oracle.sample(h.number);
  if (*h.hardware_trace != tag) return HpbVerdict::OracleMismatch;
  const std::size_t n = cfg.clique.sealers.size();
  const std::uint32_t expected = *index == hpb_in_turn_index(tag, n) ? 2 : 1;
  if (h.difficulty != expected) return HpbVerdict::BadDifficulty;
  if (h.difficulty == 1 && *index != hpb_calc_miner(h.number, tag, n)) return HpbVerdict::WrongMiner;
  return HpbVerdict::Ok;
}

VrfKeyPair vrf_keygen(std::uint64_t seed) {
  Sha256 h;
  h.update("vrf-sk");
  h.update_u64(seed);
  VrfKeyPair keys;
  keys.sk = h.finish();
  keys.pk = vrf_public_key(keys.sk);
  return keys;
}

Digest vrf_public_key(const Digest& sk) {
  Sha256 h;
  h.update("pk");
  h.update(sk);
  return h.finish();
}

Digest vrf_hash(const Digest& sk, const Digest& s) {
  Sha256 h;
  h.update(sk);
  h.update(s);
  return h.finish();
}

Digest vrf_prove(const Digest& sk, const Digest& s) {
  Sha256 h;
  h.update("proof");
  h.update(sk);
  h.update(s);
  return h.finish();
}

std::size_t VrfRegistry::DigestHash::operator()(const Digest& d) const noexcept {
  return static_cast<std::size_t>(digest_prefix_u64(d));
}

void VrfRegistry::add(const VrfKeyPair& keys) { secrets_[keys.pk] = keys.sk; }

bool VrfRegistry::knows(const Digest& pk) const { return secrets_.contains(pk); }

bool VrfRegistry::verify(const Digest& pk, const Digest& s, const Digest& hs, const Digest& proof) const {
  auto it = secrets_.find(pk);
  if (it == secrets_.end()) return false;
  return vrf_hash(it->second, s) == hs && vrf_prove(it->second, s) == proof;
}

Digest vrf_seed(BlockId parent, std::uint64_t height, std::uint32_t attempt) {
  Sha256 h;
  h.update("vrf-seed");
  h.update_u64(parent.value);
  h.update_u64(height);
  h.update_u32(attempt);
  return h.finish();
}

double vrf_fraction(const Digest& hs) { return static_cast<double>(digest_prefix_u64(hs)) * 0x1p-64; }

bool vrf_is_candidate(const Digest& hs, double threshold) { return vrf_fraction(hs) < threshold; }

double vrf_threshold(const VrfConfig& cfg) {
  return cfg.threshold.value_or(1.0 / static_cast<double>(cfg.sealers.size()));
}

Millis vrf_slot_time(const Block& parent, std::uint32_t attempt, const VrfConfig& cfg) {
  return parent.header().timestamp + cfg.period + static_cast<Millis>(attempt) * cfg.attempt_timeout;
}

std::vector<std::vector<std::size_t>> vrf_leader_election(std::span<const VrfKeyPair> keys,
                                                          std::span<const Digest> seeds, double threshold) {
  std::vector<std::vector<std::size_t>> winners(seeds.size());
  for (std::size_t h = 0; h < seeds.size(); ++h)
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (vrf_is_candidate(vrf_hash(keys[i].sk, seeds[h]), threshold)) winners[h].push_back(i);
  return winners;
}

VrfClaim vrf_claim(const VrfKeyPair& keys, const Block& tip, std::uint32_t attempt) {
  const Digest s = vrf_seed(tip.id(), tip.number() + 1, attempt);
  return VrfClaim{attempt, vrf_hash(keys.sk, s), vrf_prove(keys.sk, s)};
}

std::optional<VrfTicket> vrf_plan(NodeId sealer, const VrfKeyPair& keys, const Block& tip, std::uint32_t attempt,
                                  const VrfConfig& cfg) {
  if (!cfg.sealers.contains(sealer)) return std::nullopt;
  VrfClaim claim = vrf_claim(keys, tip, attempt);
  if (!vrf_is_candidate(claim.output, vrf_threshold(cfg))) return std::nullopt;
  VrfTicket ticket;
  ticket.plan.number = tip.number() + 1;
  ticket.plan.parent = tip.id();
  ticket.plan.sealer = sealer;
  ticket.plan.difficulty = 2;
  ticket.plan.timestamp = vrf_slot_time(tip, attempt, cfg);
  ticket.plan.send_at = ticket.plan.timestamp;
  ticket.claim = claim;
  return ticket;
}

BlockPtr vrf_seal(const SealPlan& plan, const VrfClaim& claim, std::vector<Transaction> txs) {
  BlockHeader h;
  h.number = plan.number;
  h.parent = plan.parent;
  h.sealer = plan.sealer;
  h.difficulty = plan.difficulty;
  h.timestamp = plan.timestamp;
  h.vrf = claim;
  return make_block(std::move(h), std::move(txs));
}

const char* to_string(VrfVerdict verdict) {
  switch (verdict) {
    case VrfVerdict::Ok: return "ok";
    case VrfVerdict::MissingClaim: return "missing-claim";
    case VrfVerdict::UnknownSealer: return "unknown-sealer";
    case VrfVerdict::BadProof: return "bad-proof";
    case VrfVerdict::AboveThreshold: return "above-threshold";
    case VrfVerdict::BadTimestamp: return "bad-timestamp";
    case VrfVerdict::BadDifficulty: return "bad-difficulty";
  }
  return "?";
}

VrfVerdict vrf_check(const Block& block, const Block& parent, const VrfRegistry& registry,
                     std::span<const Digest> public_keys, const VrfConfig& cfg) {
  const auto& h = block.header();
  if (!h.vrf) return VrfVerdict::MissingClaim;
  const auto index = cfg.sealers.index_of(h.sealer);
  if (!index || *index >= public_keys.size()) return VrfVerdict::UnknownSealer;
  if (h.difficulty != 2) return VrfVerdict::BadDifficulty;
  const VrfClaim& claim = *h.vrf;
  if (claim.attempt >= cfg.max_attempts) return VrfVerdict::BadTimestamp;
  const Digest s = vrf_seed(parent.id(), h.number, claim.attempt);
  if (!registry.verify(public_keys[*index], s, claim.output, claim.proof)) return VrfVerdict::BadProof;
  if (!vrf_is_candidate(claim.output, vrf_threshold(cfg))) return VrfVerdict::AboveThreshold;
  if (h.timestamp != vrf_slot_time(parent, claim.attempt, cfg)) return VrfVerdict::BadTimestamp;
  return VrfVerdict::Ok;
}

}  // namespace poa
