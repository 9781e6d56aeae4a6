#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "poa/clique.hpp"
#include "poa/committee.hpp"
#include "poa/random.hpp"
#include "poa/types.hpp"

namespace poa {

// Identity-checked Clique verification.

/// First sealer after the in-turn index, in rotation order, that is not
/// recently signed. nullopt when nobody qualifies.
std::optional<NodeId> expected_edge_sealer(std::uint64_t number, const CliqueConfig& cfg,
                                           const RecentSigners& window);

/// `clique_verify` plus: a difficulty-1 block must come from
/// `expected_edge_sealer` for its height.
bool clique_verify_patched(const Block& block, const CliqueConfig& cfg, const RecentSigners& window);

// Hardware randomness rotation.

/// One shared randomness source: every node sampling round r gets the same
/// value.
class HardwareOracle {
 public:
  explicit HardwareOracle(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t sample(std::uint64_t round) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Index of the weight-2 miner for a trace: (trace + 1) mod N.
std::size_t hpb_in_turn_index(std::uint64_t trace, std::size_t committee_size);

/// Index of the only sealer allowed a weight-1 block: (tag + number) mod N,
/// moved one step further when it collides with the in-turn index.
std::size_t hpb_calc_miner(std::uint64_t number, std::uint64_t tag, std::size_t committee_size);

struct HpbConfig {
  CliqueConfig clique;
};

/// Weight 2 for the in-turn miner sent at the scheduled time; weight 1 with a
/// wiggle otherwise. The sampled trace travels in the header. nullopt for
/// non-members.
std::optional<SealPlan> hpb_plan(NodeId sealer, Millis now, const HardwareOracle& oracle, const HpbConfig& cfg,
                                 const Block& tip, Rng& rng);

/// Block carrying a plan produced by `hpb_plan` (or a forged one).
BlockPtr hpb_seal(const SealPlan& plan, std::uint64_t trace, std::vector<Transaction> txs);

enum class HpbVerdict : std::uint8_t {
  Ok,
  MissingTrace,
  OracleMismatch,  // header trace differs from the locally sampled tag
  BadDifficulty,
  WrongMiner,
  NotMember,
};

const char* to_string(HpbVerdict verdict);

HpbVerdict hpb_check(const Block& block, const HardwareOracle& oracle, const HpbConfig& cfg);
inline bool hpb_verify(const Block& block, const HardwareOracle& oracle, const HpbConfig& cfg) {
  return hpb_check(block, oracle, cfg) == HpbVerdict::Ok;
}

// VRF-based election. This keyed-hash construction only simulates the
// interface of a VRF; it is not a secure VRF.

struct VrfKeyPair {
  Digest sk{};
  Digest pk{};
};

VrfKeyPair vrf_keygen(std::uint64_t seed);
Digest vrf_public_key(const Digest& sk);
Digest vrf_hash(const Digest& sk, const Digest& s);
Digest vrf_prove(const Digest& sk, const Digest& s);

/// Public-key registry. Verification recomputes outputs through the
/// registered secret, standing in for the public check of a real VRF.
class VrfRegistry {
 public:
  void add(const VrfKeyPair& keys);
  bool knows(const Digest& pk) const;
  bool verify(const Digest& pk, const Digest& s, const Digest& hs, const Digest& proof) const;

 private:
  struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept;
  };
  std::unordered_map<Digest, Digest, DigestHash> secrets_;
};

/// Seed negotiated for (parent, height, attempt).
Digest vrf_seed(BlockId parent, std::uint64_t height, std::uint32_t attempt);

/// hs read as a fraction of the hash range, in [0, 1).
double vrf_fraction(const Digest& hs);
bool vrf_is_candidate(const Digest& hs, double threshold);

struct VrfConfig {
  Committee sealers;
  Millis period{3000};
  /// Added per fallback attempt when nobody is a candidate.
  Millis attempt_timeout{3000};
  /// Candidate threshold; 1/N when unset.
  std::optional<double> threshold;
  std::uint32_t max_attempts{64};
};

double vrf_threshold(const VrfConfig& cfg);

/// Timestamp a block of `attempt` must carry.
Millis vrf_slot_time(const Block& parent, std::uint32_t attempt, const VrfConfig& cfg);

/// Candidate indices per seed, indices into `keys`.
std::vector<std::vector<std::size_t>> vrf_leader_election(std::span<const VrfKeyPair> keys,
                                                          std::span<const Digest> seeds, double threshold);

/// Claim and plan for `attempt` when the sealer is a candidate.
struct VrfTicket {
  SealPlan plan;
  VrfClaim claim;
};

std::optional<VrfTicket> vrf_plan(NodeId sealer, const VrfKeyPair& keys, const Block& tip, std::uint32_t attempt,
                                  const VrfConfig& cfg);

/// Claim computed from the sealer's key whether or not it clears the
/// threshold.
VrfClaim vrf_claim(const VrfKeyPair& keys, const Block& tip, std::uint32_t attempt);

BlockPtr vrf_seal(const SealPlan& plan, const VrfClaim& claim, std::vector<Transaction> txs);

enum class VrfVerdict : std::uint8_t {
  Ok,
  MissingClaim,
  UnknownSealer,
  BadProof,
  AboveThreshold,
  BadTimestamp,
  BadDifficulty,
};

const char* to_string(VrfVerdict verdict);

/// `public_keys[i]` is the registered key of committee member i.
VrfVerdict vrf_check(const Block& block, const Block& parent, const VrfRegistry& registry,
                     std::span<const Digest> public_keys, const VrfConfig& cfg);

}  // namespace poa
