#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rumor/graph.hpp"
#include "rumor/protocol.hpp"
#include "rumor/random.hpp"
#include "rumor/schedule.hpp"

namespace rumor {

/// Pending transmission of `node` at `time`. Ordered by (time, node).
struct Event {
  double time;
  NodeId node;

  friend auto operator<=>(const Event&, const Event&) = default;
};

/// 4-ary min-heap of events keyed by (time, node). replace_top() serves the
/// common "fire and reschedule the same node" step with one sift-down.
class EventQueue {
public:
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  const Event& top() const noexcept { return heap_.front(); }

  void clear() noexcept { heap_.clear(); }

  void push(Event ev) {
    heap_.push_back(ev);
    std::size_t i = heap_.size() - 1;
    while (i > 0) {
      const std::size_t parent = (i - 1) / kArity;
      if (!before(ev, heap_[parent])) break;
      heap_[i] = heap_[parent];
      i = parent;
    }
    heap_[i] = ev;
  }

  void pop() {
    const Event last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) sift_down(last);
  }

  void replace_top(Event ev) { sift_down(ev); }

private:
  static constexpr std::size_t kArity = 4;

  static bool before(const Event& a, const Event& b) noexcept {
    return (a.time < b.time) | ((a.time == b.time) & (a.node < b.node));
  }

  void sift_down(Event ev) {
    const std::size_t n = heap_.size();
    std::size_t i = 0;
    for (;;) {
      const std::size_t first = kArity * i + 1;
      if (first >= n) break;
      std::size_t best = first;
      if (first + kArity <= n) {
        const std::size_t a = before(heap_[first + 1], heap_[first]) ? first + 1 : first;
        const std::size_t b = before(heap_[first + 3], heap_[first + 2]) ? first + 3 : first + 2;
        best = before(heap_[b], heap_[a]) ? b : a;
      } else {
        for (std::size_t c = first + 1; c < n; ++c)
          if (before(heap_[c], heap_[best])) best = c;
      }
      if (!before(heap_[best], ev)) break;
      heap_[i] = heap_[best];
      i = best;
    }
    heap_[i] = ev;
  }

  std::vector<Event> heap_;
};

struct AsyncOptions {
  bool prune_saturated = true;
  TransmissionObserver observer;
};

struct AsyncTrace {
  double broadcast_time = 0.0;
  /// Time each node became informed; the start node is 0.
  std::vector<double> informing_times;
};

/// Continuous-time push protocol. Every informed node transmits after
/// independent Exp(1) delays (first one measured from being informed), with
/// addressees chosen exactly as in the synchronous model. Stops when the
/// last node is informed; pending events are discarded.
inline AsyncTrace run_async(const Graph& g, const Schedule& sched, const ProtocolConfig& cfg, NodeId start,
                            RandomSource& rng, const AsyncOptions& options = {}) {
  cfg.validate();
  const NodeId n = g.node_count();
  if (start >= n) throw std::invalid_argument("start node out of range");
  const bool quasi = cfg.model == Model::Quasirandom;
  if (quasi && sched.node_count() != n)
    throw std::invalid_argument("quasirandom run needs a schedule for every node");
  const bool prune = options.prune_saturated && pruning_worthwhile(g);
  const bool lossy = !cfg.lossless();
  const bool complete = g.kind() == GraphKind::Complete;
  const bool implicit_lists = complete && sched.follows_adjacency();

  AsyncTrace trace;
  trace.informing_times.assign(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> cursor(quasi ? n : 0, 0);
  std::vector<std::uint32_t> uninformed_neighbors;
  if (prune) {
    uninformed_neighbors.resize(n);
    for (NodeId u = 0; u < n; ++u) uninformed_neighbors[u] = static_cast<std::uint32_t>(g.degree(u));
  }

  EventQueue queue;
  NodeId informed = 0;
  auto inform = [&](NodeId v, double t) {
    trace.informing_times[v] = t;
    ++informed;
    const auto deg = g.degree(v);
    if (prune)
      for (NodeId w : g.neighbors(v)) --uninformed_neighbors[w];
    if (deg == 0) return;
    if (quasi) cursor[v] = static_cast<std::uint32_t>(rng.uniform_index(deg));
    queue.push({t + rng.exponential(), v});
  };

  inform(start, 0.0);
  double last = 0.0;
  while (informed < n) {
    if (queue.empty()) throw std::invalid_argument("graph is not connected");
    const Event ev = queue.top();
    if (ev.time < last) throw std::logic_error("event times went backwards");
    last = ev.time;
    const NodeId u = ev.node;
    if (prune && uninformed_neighbors[u] == 0) {
      queue.pop();
      continue;
    }

    const auto deg = static_cast<std::uint32_t>(g.degree(u));
    NodeId target;
    if (quasi) {
      const NodeId k = cursor[u];
      target = implicit_lists ? complete_neighbor(u, k) : sched.of(u)[k];
      if (++cursor[u] == deg) cursor[u] = 0;
    } else {
      const auto k = static_cast<NodeId>(rng.uniform_index(deg));
      target = complete ? complete_neighbor(u, k) : g.neighbors(u)[k];
    }
    const bool delivered = !lossy || rng.bernoulli(cfg.success_prob);
    if (options.observer) options.observer({u, target, delivered});
    // Reschedule the sender before informing the target so the heap top is
    // still the sender's slot.
    queue.replace_top({ev.time + rng.exponential(), u});
    if (delivered && trace.informing_times[target] == std::numeric_limits<double>::infinity()) {
      inform(target, ev.time);
      trace.broadcast_time = ev.time;
    }
  }
  return trace;
}

}  // namespace rumor
