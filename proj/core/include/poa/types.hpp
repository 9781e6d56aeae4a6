#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace poa {

/// Simulated wall-clock time in milliseconds since the start of a run.
using Millis = std::int64_t;

using Digest = std::array<std::uint8_t, 32>;

struct NodeId {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t value{kNone};

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  static constexpr NodeId none() { return NodeId{}; }
  constexpr bool valid() const { return value != kNone; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Account that signs transactions. Sealers own the account with their node
/// number; users attached to node k own `user_account(k)`.
struct AccountId {
  std::uint32_t value{0};

  constexpr AccountId() = default;
  constexpr explicit AccountId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(AccountId, AccountId) = default;
};

constexpr std::uint32_t kUserAccountBase = 1'000'000;

constexpr AccountId user_account(NodeId origin) { return AccountId{kUserAccountBase + origin.value}; }
constexpr AccountId sealer_account(NodeId sealer) { return AccountId{sealer.value}; }

struct TxId {
  std::uint64_t value{0};

  constexpr TxId() = default;
  constexpr explicit TxId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(TxId, TxId) = default;
};

/// 64-bit block identifier derived from the block digest. Ordering on the
/// integer value coincides with lexicographic order of the fixed-width hex.
struct BlockId {
  std::uint64_t value{0};

  constexpr BlockId() = default;
  constexpr explicit BlockId(std::uint64_t v) : value(v) {}

  std::string hex() const;

  friend constexpr auto operator<=>(BlockId, BlockId) = default;
};

enum class TxKind : std::uint8_t { User, AttackerFront, AttackerBack };

const char* to_string(TxKind kind);

struct Transaction {
  TxId id;
  AccountId sender;
  std::uint64_t nonce{0};
  std::uint64_t gas_price{0};
  std::uint64_t gas_limit{21'000};
  Millis arrival_time{0};
  TxKind kind{TxKind::User};

  bool operator==(const Transaction&) const = default;
};

/// Election evidence carried by blocks under the VRF-based rotation.
struct VrfClaim {
  std::uint32_t attempt{0};
  Digest output{};
  Digest proof{};

  bool operator==(const VrfClaim&) const = default;
};

struct BlockHeader {
  std::uint64_t number{0};
  BlockId parent;
  NodeId sealer;
  std::uint32_t difficulty{0};
  Millis timestamp{0};
  /// Hardware randomness sampled by the proposer (HPB rotation only).
  std::optional<std::uint64_t> hardware_trace;
  std::optional<VrfClaim> vrf;

  bool operator==(const BlockHeader&) const = default;
};

class Block {
 public:
  Block(BlockHeader header, std::vector<Transaction> txs);

  const BlockHeader& header() const { return header_; }
  const std::vector<Transaction>& txs() const { return txs_; }
  BlockId id() const { return id_; }

  std::uint64_t number() const { return header_.number; }
  NodeId sealer() const { return header_.sealer; }

 private:
  BlockHeader header_;
  std::vector<Transaction> txs_;
  BlockId id_;
};

using BlockPtr = std::shared_ptr<const Block>;

BlockId compute_block_id(const BlockHeader& header, const std::vector<Transaction>& txs);

BlockPtr make_block(BlockHeader header, std::vector<Transaction> txs);

/// The shared genesis block: number 0, no sealer, difficulty 0, time 0.
BlockPtr make_genesis();

struct Vote {
  NodeId voter;
  BlockId block;

  friend constexpr auto operator<=>(const Vote&, const Vote&) = default;
};

/// Deterministic allocator for transaction ids, shared by everything that
/// mints transactions within one run.
class TxIdAllocator {
 public:
  explicit TxIdAllocator(std::uint64_t first = 1) : next_(first) {}
  TxId next() { return TxId{next_++}; }
  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_;
};

}  // namespace poa

template <>
struct std::hash<poa::NodeId> {
  std::size_t operator()(poa::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<poa::AccountId> {
  std::size_t operator()(poa::AccountId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<poa::TxId> {
  std::size_t operator()(poa::TxId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

template <>
struct std::hash<poa::BlockId> {
  // Block ids are already uniformly distributed digest prefixes.
  std::size_t operator()(poa::BlockId id) const noexcept { return static_cast<std::size_t>(id.value); }
};
