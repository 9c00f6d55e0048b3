#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rumor/graph.hpp"
#include "rumor/protocol.hpp"
#include "rumor/random.hpp"
#include "rumor/schedule.hpp"

namespace rumor {

/// Mutable state of one synchronous run.
///
/// A quasirandom node u that became informed draws a start offset s_u and
/// from then on addresses schedule(u)[(s_u + c_u) mod deg(u)], where c_u is
/// the number of transmissions it has sent. Senders are kept sorted by id.
///
/// With pruning enabled, a node whose neighbors are all informed stops
/// sending: its transmissions could not change the informed set.
class SyncState {
public:
  SyncState(const Graph& g, const ProtocolConfig& cfg, NodeId start, RandomSource& rng,
            bool prune_saturated = true)
      : graph_(&g),
        quasi_(cfg.model == Model::Quasirandom),
        prune_(prune_saturated && pruning_worthwhile(g)),
        complete_(g.kind() == GraphKind::Complete),
        informed_(g.node_count(), 0),
        informed_round_(g.node_count(), kNeverInformed) {
    if (start >= g.node_count()) throw std::invalid_argument("start node out of range");
    if (quasi_) {
      start_offset_.assign(g.node_count(), 0);
      cursor_.assign(g.node_count(), 0);
      sent_.assign(g.node_count(), 0);
    }
    if (prune_) {
      uninformed_neighbors_.resize(g.node_count());
      for (NodeId u = 0; u < g.node_count(); ++u)
        uninformed_neighbors_[u] = static_cast<std::uint32_t>(g.degree(u));
    }
    inform(start, 0, rng);
    senders_.push_back(start);
    fresh_.clear();
  }

  std::uint32_t round() const noexcept { return round_; }
  NodeId informed_count() const noexcept { return informed_count_; }
  bool is_informed(NodeId u) const noexcept { return informed_[u] != 0; }
  bool all_informed() const noexcept { return informed_count_ == graph_->node_count(); }

  /// Round in which u became informed (start: 0), kNeverInformed otherwise.
  std::uint32_t informed_round(NodeId u) const noexcept { return informed_round_[u]; }
  std::uint32_t start_offset(NodeId u) const noexcept { return quasi_ ? start_offset_[u] : 0; }
  std::uint32_t sent(NodeId u) const noexcept { return quasi_ ? sent_[u] : 0; }

  /// Nodes that will send next round, ascending id.
  std::span<const NodeId> senders() const noexcept { return senders_; }

  std::vector<std::uint32_t> take_informed_rounds() && { return std::move(informed_round_); }

  std::vector<NodeId> informed_nodes() const {
    std::vector<NodeId> out;
    out.reserve(informed_count_);
    for (NodeId u = 0; u < graph_->node_count(); ++u)
      if (informed_[u]) out.push_back(u);
    return out;
  }

private:
  friend void sync_round(const Graph&, const Schedule&, const ProtocolConfig&, SyncState&, RandomSource&,
                         const TransmissionObserver&);

  void inform(NodeId v, std::uint32_t round, RandomSource& rng) {
    informed_[v] = 1;
    informed_round_[v] = round;
    ++informed_count_;
    const auto deg = graph_->degree(v);
    if (quasi_ && deg > 0) {
      start_offset_[v] = static_cast<std::uint32_t>(rng.uniform_index(deg));
      cursor_[v] = start_offset_[v];
    }
    if (prune_)
      for (NodeId w : graph_->neighbors(v)) --uninformed_neighbors_[w];
    fresh_.push_back(v);
  }

  const Graph* graph_;
  bool quasi_;
  bool prune_;
  bool complete_;
  std::uint32_t round_ = 0;
  NodeId informed_count_ = 0;
  std::vector<std::uint8_t> informed_;
  std::vector<std::uint32_t> informed_round_;
  std::vector<std::uint32_t> start_offset_;
  std::vector<std::uint32_t> cursor_;
  std::vector<std::uint32_t> sent_;
  std::vector<std::uint32_t> uninformed_neighbors_;
  std::vector<NodeId> senders_;
  std::vector<NodeId> fresh_;
  std::vector<NodeId> merge_buffer_;
};

/// One synchronous round. Every node informed at the start of the round
/// sends once, in ascending id order: addressee draw (or list position),
/// then the delivery coin when f < 1. Nodes informed during the round first
/// send in the next one. A lost transmission still advances the sender.
inline void sync_round(const Graph& g, const Schedule& sched, const ProtocolConfig& cfg, SyncState& st,
                       RandomSource& rng, const TransmissionObserver& observer = {}) {
  const bool lossy = !cfg.lossless();
  const double f = cfg.success_prob;
  const bool implicit_lists = st.complete_ && sched.follows_adjacency();
  st.fresh_.clear();
  std::size_t keep = 0;
  for (std::size_t k = 0; k < st.senders_.size(); ++k) {
    const NodeId u = st.senders_[k];
    if (st.prune_ && st.uninformed_neighbors_[u] == 0) continue;
    const auto deg = static_cast<std::uint32_t>(g.degree(u));
    if (deg == 0) continue;
    st.senders_[keep++] = u;

    NodeId target;
    if (st.quasi_) {
      const NodeId k = st.cursor_[u];
      target = implicit_lists ? complete_neighbor(u, k) : sched.of(u)[k];
      if (++st.cursor_[u] == deg) st.cursor_[u] = 0;
      ++st.sent_[u];
    } else {
      const auto k = static_cast<NodeId>(rng.uniform_index(deg));
      target = st.complete_ ? complete_neighbor(u, k) : g.neighbors(u)[k];
    }
    const bool delivered = !lossy || rng.bernoulli(f);
    if (observer) observer({u, target, delivered});
    if (delivered && !st.informed_[target]) st.inform(target, st.round_ + 1, rng);
  }
  st.senders_.resize(keep);
  if (!st.fresh_.empty()) {
    std::sort(st.fresh_.begin(), st.fresh_.end());
    st.merge_buffer_.resize(st.senders_.size() + st.fresh_.size());
    std::merge(st.senders_.begin(), st.senders_.end(), st.fresh_.begin(), st.fresh_.end(),
               st.merge_buffer_.begin());
    std::swap(st.senders_, st.merge_buffer_);
  }
  ++st.round_;
}

struct SyncOptions {
  /// 0 selects the default cap of ceil(10^4 / f).
  std::uint32_t round_cap = 0;
  /// Capture the informed set after this round (0: before the first round).
  std::optional<std::uint32_t> snapshot_at;
  /// Stop after this many rounds even if not everyone is informed.
  std::optional<std::uint32_t> stop_after;
  bool prune_saturated = true;
  TransmissionObserver observer;
};

struct RunTrace {
  /// Rounds until all nodes were informed; equals rounds executed when the
  /// run was stopped early (see `completed`).
  std::uint32_t broadcast_time = 0;
  bool completed = false;
  /// Cumulative informed count after each round, index 0 is 1.
  std::vector<NodeId> informed_counts;
  std::optional<std::vector<NodeId>> snapshot;
  /// Round in which each node became informed, kNeverInformed if it did not.
  std::vector<std::uint32_t> informed_round;
};

inline std::uint32_t default_round_cap(double success_prob) {
  return static_cast<std::uint32_t>(std::ceil(1e4 / success_prob));
}

/// Runs sync_round until every node is informed.
inline RunTrace run_sync(const Graph& g, const Schedule& sched, const ProtocolConfig& cfg, NodeId start,
                         RandomSource& rng, const SyncOptions& options = {}) {
  cfg.validate();
  if (cfg.model == Model::Quasirandom && sched.node_count() != g.node_count())
    throw std::invalid_argument("quasirandom run needs a schedule for every node");
  const std::uint32_t cap = options.round_cap ? options.round_cap : default_round_cap(cfg.success_prob);
  const NodeId n = g.node_count();

  SyncState st(g, cfg, start, rng, options.prune_saturated);
  RunTrace trace;
  trace.informed_counts.push_back(st.informed_count());
  if (options.snapshot_at == 0u) trace.snapshot = st.informed_nodes();

  while (st.informed_count() < n) {
    if (options.stop_after && st.round() >= *options.stop_after) break;
    if (st.round() >= cap) throw NonTermination(cap);
    sync_round(g, sched, cfg, st, rng, options.observer);
    trace.informed_counts.push_back(st.informed_count());
    if (options.snapshot_at == st.round()) trace.snapshot = st.informed_nodes();
  }
  if (options.snapshot_at && !trace.snapshot) trace.snapshot = st.informed_nodes();
  trace.completed = st.informed_count() == n;
  trace.broadcast_time = st.round();
  trace.informed_round = std::move(st).take_informed_rounds();
  return trace;
}

}  // namespace rumor
