#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "poa/chain_store.hpp"
#include "poa/digest.hpp"
#include "poa/random.hpp"
#include "poa/types.hpp"

namespace poa {

struct NetworkModel {
  Millis min_delay{10};
  Millis delta_max{200};
};

struct FaultEntry {
  NodeId node;
  Millis crash_at{0};
  std::optional<Millis> recover_at;  // permanent when empty
};

struct FaultSchedule {
  std::vector<FaultEntry> entries;
};

struct Workload {
  /// Transactions per second injected at every node.
  double tx_rate{10.0};
  /// Injection stops at this time.
  Millis run_length{0};
  std::uint64_t gas_price_min{1};
  std::uint64_t gas_price_max{100};
  std::uint64_t gas_limit{21'000};
};

/// Throw std::invalid_argument on inconsistent parameters.
void validate(const NetworkModel& net);
void validate(const FaultSchedule& faults);
void validate(const Workload& workload);

enum class EventKind : std::uint8_t {
  DeliverBlock,
  DeliverTx,
  DeliverVote,
  BlockRequest,
  TimerFire,
  NodeCrash,
  NodeRecover,
  InjectTx,
};

const char* to_string(EventKind kind);

/// One executed event. `from` and `sent_at` describe the emitting node for
/// messages; for local events `from` equals `node`.
struct EventRecord {
  Millis at{0};
  std::uint64_t seq{0};
  EventKind kind{EventKind::TimerFire};
  NodeId node;
  NodeId from;
  Millis sent_at{0};
  std::uint64_t payload{0};
};

/// `time,seq,kind,node,payload-digest`
std::string format_event(const EventRecord& record);
void write_event_log(std::ostream& out, const std::vector<EventRecord>& records);

class Simulator;

/// Capabilities a node uses while handling one event.
class NodeContext {
 public:
  NodeContext(Simulator& sim, NodeId self) : sim_(&sim), self_(self) {}

  Millis now() const;
  NodeId self() const { return self_; }
  std::size_t node_count() const;

  void broadcast_block(const BlockPtr& block);
  void broadcast_vote(const Vote& vote);
  void send_block(NodeId to, const BlockPtr& block);
  void request_block(NodeId to, BlockId id);
  void schedule_timer(Millis at, std::uint64_t token);

 private:
  Simulator* sim_;
  NodeId self_;
};

class NodeBehavior {
 public:
  virtual ~NodeBehavior() = default;

  virtual void start(NodeContext& /*ctx*/) {}
  virtual void on_transaction(NodeContext& /*ctx*/, const Transaction& /*tx*/, bool /*local*/) {}
  virtual void on_block(NodeContext& /*ctx*/, NodeId /*from*/, const BlockPtr& /*block*/) {}
  virtual void on_vote(NodeContext& /*ctx*/, NodeId /*from*/, const Vote& /*vote*/) {}
  virtual void on_timer(NodeContext& /*ctx*/, std::uint64_t /*token*/) {}
  virtual void on_block_request(NodeContext& /*ctx*/, NodeId /*from*/, BlockId /*id*/) {}
  virtual void on_crash(Millis /*now*/) {}
  virtual void on_recover(NodeContext& /*ctx*/) {}

  virtual const ChainStore* chain() const { return nullptr; }
};

struct SimConfig {
  NetworkModel net;
  FaultSchedule faults;
  Workload workload;
  std::uint64_t seed{1};
  /// Events scheduled after this time are not executed.
  Millis until{0};
  bool record_events{false};
};

/// Single-threaded event loop over a complete graph of nodes. Events run in
/// (at, seq) order; per-link delivery is FIFO with delays drawn from a
/// per-link stream in [min_delay, delta_max]. Messages to crashed nodes are
/// dropped.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Nodes get ids 0, 1, ... in insertion order. Must precede `run`.
  NodeId add_node(std::unique_ptr<NodeBehavior> node);

  void run();

  Millis now() const { return now_; }
  const SimConfig& config() const { return cfg_; }
  std::size_t node_count() const { return nodes_.size(); }
  NodeBehavior& node(NodeId id) { return *nodes_.at(id.value).behavior; }
  const NodeBehavior& node(NodeId id) const { return *nodes_.at(id.value).behavior; }
  bool is_up(NodeId id) const { return nodes_.at(id.value).up; }

  TxIdAllocator& tx_ids() { return tx_ids_; }
  /// Every injected user transaction, in injection order.
  const std::vector<Transaction>& injected() const { return txs_; }

  const std::vector<EventRecord>& events() const { return records_; }
  /// Rolling digest over every executed event.
  std::uint64_t log_digest() const { return digest_.value(); }
  std::uint64_t executed_events() const { return executed_; }
  std::uint64_t dropped_events() const { return dropped_; }

  /// Called after each executed event.
  void set_observer(std::function<void(const EventRecord&)> observer) { observer_ = std::move(observer); }

  // Message plumbing used through NodeContext.
  void broadcast_block(NodeId from, const BlockPtr& block);
  void broadcast_vote(NodeId from, const Vote& vote);
  void send_block(NodeId from, NodeId to, const BlockPtr& block);
  void request_block(NodeId from, NodeId to, BlockId id);
  void schedule_timer(NodeId node, Millis at, std::uint64_t token);

 private:
  struct Event {
    Millis at;
    std::uint64_t seq;
    EventKind kind;
    NodeId node;
    NodeId from;
    Millis sent_at;
    std::uint64_t arg;
    BlockPtr block;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };
  struct NodeSlot {
    std::unique_ptr<NodeBehavior> behavior;
    bool up{true};
    Rng workload_rng;
    std::uint64_t user_nonce{0};
  };

  void push(Event ev);
  void send(NodeId from, NodeId to, EventKind kind, std::uint64_t arg, BlockPtr block);
  Rng& link(NodeId from, NodeId to);
  void schedule_injection(NodeId node, std::uint64_t k);
  void execute(Event& ev);
  static std::uint64_t payload_digest(const Event& ev);

  SimConfig cfg_;
  std::vector<NodeSlot> nodes_;
  std::vector<std::unique_ptr<Rng>> links_;
  std::vector<Millis> link_last_;
  std::vector<Event> queue_;
  std::vector<Transaction> txs_;
  std::vector<EventRecord> records_;
  std::function<void(const EventRecord&)> observer_;
  TxIdAllocator tx_ids_;
  Fnv1a64 digest_;
  Millis now_{0};
  std::uint64_t next_seq_{0};
  std::uint64_t executed_{0};
  std::uint64_t dropped_{0};
  double interval_{0.0};
  bool started_{false};
};

}  // namespace poa
