#include "poa/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace poa {

void validate(const NetworkModel& net) {
  if (net.min_delay < 0 || net.delta_max < 0) throw std::invalid_argument("network: negative delay");
  if (net.min_delay > net.delta_max) throw std::invalid_argument("network: min_delay exceeds delta_max");
}

void validate(const FaultSchedule& faults) {
  for (const auto& e : faults.entries) {
    if (!e.node.valid()) throw std::invalid_argument("faults: invalid node");
    if (e.crash_at < 0) throw std::invalid_argument("faults: negative crash time");
    if (e.recover_at && *e.recover_at <= e.crash_at) throw std::invalid_argument("faults: recover_at <= crash_at");
  }
}

void validate(const Workload& workload) {
  if (!(workload.tx_rate >= 0.0) || !std::isfinite(workload.tx_rate))
    throw std::invalid_argument("workload: tx_rate must be a non-negative number");
  if (workload.run_length < 0) throw std::invalid_argument("workload: negative run length");
  if (workload.gas_price_min > workload.gas_price_max) throw std::invalid_argument("workload: empty gas price range");
  if (workload.gas_limit == 0) throw std::invalid_argument("workload: gas limit must be positive");
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::DeliverBlock: return "DeliverBlock";
    case EventKind::DeliverTx: return "DeliverTx";
    case EventKind::DeliverVote: return "DeliverVote";
    case EventKind::BlockRequest: return "BlockRequest";
    case EventKind::TimerFire: return "TimerFire";
    case EventKind::NodeCrash: return "NodeCrash";
    case EventKind::NodeRecover: return "NodeRecover";
    case EventKind::InjectTx: return "InjectTx";
  }
  return "?";
}

std::string format_event(const EventRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld,%llu,%s,%u,%016llx", static_cast<long long>(r.at),
                static_cast<unsigned long long>(r.seq), to_string(r.kind), r.node.value,
                static_cast<unsigned long long>(r.payload));
  return buf;
}

void write_event_log(std::ostream& out, const std::vector<EventRecord>& records) {
  for (const auto& r : records) out << format_event(r) << '\n';
}

Millis NodeContext::now() const { return sim_->now(); }
std::size_t NodeContext::node_count() const { return sim_->node_count(); }
void NodeContext::broadcast_block(const BlockPtr& block) { sim_->broadcast_block(self_, block); }
void NodeContext::broadcast_vote(const Vote& vote) { sim_->broadcast_vote(self_, vote); }
void NodeContext::send_block(NodeId to, const BlockPtr& block) { sim_->send_block(self_, to, block); }
void NodeContext::request_block(NodeId to, BlockId id) { sim_->request_block(self_, to, id); }
void NodeContext::schedule_timer(Millis at, std::uint64_t token) { sim_->schedule_timer(self_, at, token); }

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_.net);
  validate(cfg_.faults);
  validate(cfg_.workload);
  if (cfg_.until <= 0) throw std::invalid_argument("simulator: until must be positive");
  if (cfg_.workload.tx_rate > 0.0) interval_ = 1000.0 / cfg_.workload.tx_rate;
}

Simulator::~Simulator() = default;

NodeId Simulator::add_node(std::unique_ptr<NodeBehavior> node) {
  if (started_) throw std::logic_error("simulator: add_node after run");
  if (!node) throw std::invalid_argument("simulator: null node");
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  NodeSlot slot;
  slot.behavior = std::move(node);
  slot.workload_rng = make_stream(cfg_.seed, StreamTag::Workload, id.value);
  nodes_.push_back(std::move(slot));
  return id;
}

void Simulator::push(Event ev) {
  ev.seq = next_seq_++;
  queue_.push_back(std::move(ev));
  std::push_heap(queue_.begin(), queue_.end(), Later{});
}

Rng& Simulator::link(NodeId from, NodeId to) {
  auto& slot = links_[static_cast<std::size_t>(from.value) * nodes_.size() + to.value];
  if (!slot) slot = std::make_unique<Rng>(make_stream(cfg_.seed, StreamTag::Link, from.value, to.value));
  return *slot;
}

void Simulator::send(NodeId from, NodeId to, EventKind kind, std::uint64_t arg, BlockPtr block) {
  if (!nodes_.at(to.value).up) return;
  const Millis d = uniform_int(link(from, to), cfg_.net.min_delay, cfg_.net.delta_max);
  auto& last = link_last_[static_cast<std::size_t>(from.value) * nodes_.size() + to.value];
  const Millis at = std::max(now_ + d, last);
  last = at;
  push(Event{at, 0, kind, to, from, now_, arg, std::move(block)});
}

void Simulator::broadcast_block(NodeId from, const BlockPtr& block) {
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (i != from.value) send(from, NodeId{i}, EventKind::DeliverBlock, block->id().value, block);
}

void Simulator::broadcast_vote(NodeId from, const Vote& vote) {
  // The voter travels as the emitting node.
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (i != from.value) send(from, NodeId{i}, EventKind::DeliverVote, vote.block.value, nullptr);
}

void Simulator::send_block(NodeId from, NodeId to, const BlockPtr& block) {
  if (to != from) send(from, to, EventKind::DeliverBlock, block->id().value, block);
}

void Simulator::request_block(NodeId from, NodeId to, BlockId id) {
  if (to != from) send(from, to, EventKind::BlockRequest, id.value, nullptr);
}

void Simulator::schedule_timer(NodeId node, Millis at, std::uint64_t token) {
  push(Event{std::max(at, now_), 0, EventKind::TimerFire, node, node, now_, token, nullptr});
}

void Simulator::schedule_injection(NodeId node, std::uint64_t k) {
  auto& slot = nodes_[node.value];
  const double jitter = std::uniform_real_distribution<double>(0.0, interval_)(slot.workload_rng);
  const auto at = static_cast<Millis>(std::floor(static_cast<double>(k) * interval_ + jitter));
  if (at >= cfg_.workload.run_length) return;
  push(Event{at, 0, EventKind::InjectTx, node, node, now_, k, nullptr});
}

std::uint64_t Simulator::payload_digest(const Event& ev) {
  if (ev.kind == EventKind::DeliverVote) {
    Fnv1a64 h;
    h.add(ev.from.value);
    h.add(ev.arg);
    return h.value();
  }
  return ev.arg;
}

void Simulator::run() {
  if (started_) throw std::logic_error("simulator: run called twice");
  started_ = true;
  const std::size_t n = nodes_.size();
  links_.resize(n * n);
  link_last_.assign(n * n, 0);

  for (const auto& e : cfg_.faults.entries) {
    if (e.node.value >= n) throw std::invalid_argument("faults: node out of range");
    push(Event{e.crash_at, 0, EventKind::NodeCrash, e.node, e.node, 0, 0, nullptr});
    if (e.recover_at) push(Event{*e.recover_at, 0, EventKind::NodeRecover, e.node, e.node, 0, 0, nullptr});
  }
  if (interval_ > 0.0)
    for (std::uint32_t i = 0; i < n; ++i) schedule_injection(NodeId{i}, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    NodeContext ctx(*this, NodeId{i});
    nodes_[i].behavior->start(ctx);
  }

  while (!queue_.empty()) {
    std::pop_heap(queue_.begin(), queue_.end(), Later{});
    Event ev = std::move(queue_.back());
    queue_.pop_back();
    if (ev.at > cfg_.until) break;
    now_ = ev.at;
    execute(ev);
  }
  queue_.clear();
}

void Simulator::execute(Event& ev) {
  auto& slot = nodes_[ev.node.value];
  const bool lifecycle = ev.kind == EventKind::NodeCrash || ev.kind == EventKind::NodeRecover;
  if (!slot.up && !lifecycle) {
    ++dropped_;
    return;
  }
  NodeContext ctx(*this, ev.node);
  switch (ev.kind) {
    case EventKind::DeliverBlock: slot.behavior->on_block(ctx, ev.from, ev.block); break;
    case EventKind::DeliverTx: slot.behavior->on_transaction(ctx, txs_[ev.arg], false); break;
    case EventKind::DeliverVote: slot.behavior->on_vote(ctx, ev.from, Vote{ev.from, BlockId{ev.arg}}); break;
    case EventKind::BlockRequest: slot.behavior->on_block_request(ctx, ev.from, BlockId{ev.arg}); break;
    case EventKind::TimerFire: slot.behavior->on_timer(ctx, ev.arg); break;
    case EventKind::NodeCrash:
      if (!slot.up) return;
      slot.up = false;
      slot.behavior->on_crash(now_);
      break;
    case EventKind::NodeRecover:
      if (slot.up) return;
      slot.up = true;
      slot.behavior->on_recover(ctx);
      break;
    case EventKind::InjectTx: {
      Transaction tx;
      tx.id = tx_ids_.next();
      tx.sender = user_account(ev.node);
      tx.nonce = slot.user_nonce++;
      tx.gas_price = static_cast<std::uint64_t>(uniform_int(slot.workload_rng,
                                                            static_cast<std::int64_t>(cfg_.workload.gas_price_min),
                                                            static_cast<std::int64_t>(cfg_.workload.gas_price_max)));
      tx.gas_limit = cfg_.workload.gas_limit;
      tx.arrival_time = now_;
      tx.kind = TxKind::User;
      const std::uint64_t index = txs_.size();
      txs_.push_back(tx);
      slot.behavior->on_transaction(ctx, txs_.back(), true);
      for (std::uint32_t i = 0; i < nodes_.size(); ++i)
        if (i != ev.node.value) send(ev.node, NodeId{i}, EventKind::DeliverTx, index, nullptr);
      schedule_injection(ev.node, ev.arg + 1);
      ev.arg = tx.id.value;
      break;
    }
  }

  ++executed_;
  EventRecord rec{ev.at, ev.seq, ev.kind, ev.node, ev.from, ev.sent_at, payload_digest(ev)};
  if (ev.kind == EventKind::DeliverTx) rec.payload = txs_[ev.arg].id.value;
  digest_.add(static_cast<std::uint64_t>(rec.at));
  digest_.add(rec.seq);
  digest_.add(static_cast<std::uint64_t>(rec.kind));
  digest_.add(rec.node.value);
  digest_.add(rec.payload);
  if (cfg_.record_events) records_.push_back(rec);
  if (observer_) observer_(rec);
}

}  // namespace poa
