#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rumor/async_engine.hpp"
#include "rumor/graph.hpp"
#include "rumor/parallel.hpp"
#include "rumor/protocol.hpp"
#include "rumor/random.hpp"
#include "rumor/schedule.hpp"
#include "rumor/stats.hpp"
#include "rumor/sync_engine.hpp"

namespace rumor {

inline constexpr std::size_t kMaxProtocols = 8;

struct ExperimentConfig {
  GraphSpec graph = spec::Complete{2};
  /// One protocol, or several evaluated on identical graph samples and
  /// start vertices (paired mode).
  std::vector<ProtocolConfig> protocols{ProtocolConfig{}};
  bool async = false;
  std::uint64_t reps = 1;
  /// Random graph families draw a fresh connected sample this often.
  /// Random lists are redrawn at the same cadence.
  std::uint64_t resample_every = 1000;
  std::uint64_t master_seed = 0;
  std::optional<std::uint32_t> snapshot_at;
  /// Synchronous runs stop after this many rounds when set.
  std::optional<std::uint32_t> stop_after;
  /// Start every run here instead of a uniform vertex.
  std::optional<NodeId> fixed_start;
  /// 0 picks 1.0 for synchronous and 0.2 for asynchronous runs.
  double bin_width = 0.0;
  unsigned threads = 1;
  std::size_t max_attempts = kDefaultMaxAttempts;

  double effective_bin_width() const noexcept { return bin_width > 0.0 ? bin_width : (async ? 0.2 : 1.0); }

  void validate() const {
    rumor::validate(graph);
    if (protocols.empty() || protocols.size() > kMaxProtocols)
      throw std::invalid_argument("need between 1 and 8 protocols");
    for (const auto& p : protocols) p.validate();
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (resample_every < 1) throw std::invalid_argument("resample_every must be >= 1");
    if (bin_width < 0.0) throw std::invalid_argument("bin width must be positive");
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
    if (fixed_start && *fixed_start >= node_count(graph)) throw std::invalid_argument("start node out of range");
  }
};

/// Everything a per-run sink gets to see.
struct RunInfo {
  std::uint64_t run;
  std::size_t protocol;
  const Graph& graph;
  NodeId start;
};

/// Executes every (run, protocol) pair of `cfg` and hands each trace to
/// `sink(const RunInfo&, trace)`, where trace is a RunTrace or an
/// AsyncTrace. Sinks may be called concurrently; all randomness of run i
/// comes from streams derived from (master_seed, purpose, i), so results
/// keyed by run index do not depend on the thread count.
template <class Sink>
void for_each_run(const ExperimentConfig& cfg, Sink&& sink) {
  cfg.validate();
  const bool fixed_graph = is_deterministic(cfg.graph);
  const std::uint64_t blocks = (cfg.reps + cfg.resample_every - 1) / cfg.resample_every;

  Graph graph;
  std::vector<Schedule> schedules(cfg.protocols.size());
  for (std::uint64_t block = 0; block < blocks; ++block) {
    const bool new_graph = block == 0 || !fixed_graph;
    if (new_graph) {
      RandomSource graph_rng = RandomSource::derived(cfg.master_seed, StreamPurpose::GraphSample, block);
      graph = sample_connected(cfg.graph, graph_rng, cfg.max_attempts);
    }
    for (std::size_t j = 0; j < cfg.protocols.size(); ++j) {
      const auto& p = cfg.protocols[j];
      if (p.model != Model::Quasirandom) continue;
      const bool random_lists = std::holds_alternative<lists::RandomPerm>(p.lists);
      if (!new_graph && !random_lists) continue;
      RandomSource list_rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(StreamPurpose::Lists) + j, block));
      schedules[j] = build_schedule(graph, p.lists, list_rng);
    }

    const std::uint64_t first = block * cfg.resample_every;
    const std::uint64_t count = std::min(cfg.resample_every, cfg.reps - first);
    const NodeId n = graph.node_count();
    parallel_for(count, cfg.threads, [&](std::uint64_t offset) {
      const std::uint64_t run = first + offset;
      NodeId start;
      if (cfg.fixed_start) {
        start = *cfg.fixed_start;
      } else {
        RandomSource start_rng = RandomSource::derived(cfg.master_seed, StreamPurpose::StartVertex, run);
        start = static_cast<NodeId>(start_rng.uniform_index(n));
      }
      for (std::size_t j = 0; j < cfg.protocols.size(); ++j) {
        RandomSource rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(StreamPurpose::Protocol) + j, run));
        const RunInfo info{run, j, graph, start};
        if (cfg.async) {
          sink(info, run_async(graph, schedules[j], cfg.protocols[j], start, rng));
        } else {
          SyncOptions options;
          options.snapshot_at = cfg.snapshot_at;
          options.stop_after = cfg.stop_after;
          sink(info, run_sync(graph, schedules[j], cfg.protocols[j], start, rng, options));
        }
      }
    });
  }
}

struct ProtocolEstimate {
  ProtocolConfig protocol;
  /// Broadcast time of run i at index i.
  std::vector<double> times;
  SummaryStats stats;
};

struct BroadcastEstimate {
  std::vector<ProtocolEstimate> protocols;
};

inline BroadcastEstimate estimate_broadcast(const ExperimentConfig& cfg) {
  std::vector<std::vector<double>> times(cfg.protocols.size(), std::vector<double>(cfg.reps, 0.0));
  for_each_run(cfg, [&](const RunInfo& info, const auto& trace) {
    times[info.protocol][info.run] = static_cast<double>(trace.broadcast_time);
  });
  BroadcastEstimate out;
  for (std::size_t j = 0; j < cfg.protocols.size(); ++j) {
    auto stats = summarize(times[j], cfg.effective_bin_width());
    out.protocols.push_back({cfg.protocols[j], std::move(times[j]), std::move(stats)});
  }
  return out;
}

struct SizeSweepRow {
  std::string graph;
  NodeId n;
  std::string protocol;
  double mean;
  double std_dev;
};

/// estimate_broadcast for each spec; spec k uses master seed derived from
/// (seed, k).
inline std::vector<SizeSweepRow> size_sweep(std::span<const GraphSpec> specs, ExperimentConfig base) {
  std::vector<SizeSweepRow> rows;
  const std::uint64_t seed = base.master_seed;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    base.graph = specs[k];
    base.master_seed = derive_seed(seed, StreamPurpose::GraphSample, k);
    const auto est = estimate_broadcast(base);
    for (const auto& p : est.protocols)
      rows.push_back({to_string(specs[k]), node_count(specs[k]), label(p.protocol), p.stats.mean, p.stats.std_dev});
  }
  return rows;
}

/// Mean number of uninformed nodes after each round, one curve per
/// protocol. Finished runs contribute 0. The curve spans `max_round + 1`
/// entries when given, otherwise up to the slowest run.
inline std::vector<std::vector<double>> uninformed_curve(const ExperimentConfig& cfg,
                                                         std::optional<std::uint32_t> max_round = std::nullopt) {
  if (cfg.async) throw std::invalid_argument("uninformed curve needs synchronous runs");
  std::vector<std::vector<std::uint64_t>> sums(cfg.protocols.size());
  std::mutex mutex;
  for_each_run(cfg, [&](const RunInfo& info, const auto& trace) {
    if constexpr (std::is_same_v<std::decay_t<decltype(trace)>, RunTrace>) {
      const NodeId n = info.graph.node_count();
      std::lock_guard lock(mutex);
      auto& sum = sums[info.protocol];
      if (sum.size() < trace.informed_counts.size()) sum.resize(trace.informed_counts.size(), 0);
      for (std::size_t t = 0; t < trace.informed_counts.size(); ++t) sum[t] += n - trace.informed_counts[t];
    }
  });
  std::size_t length = 0;
  for (const auto& s : sums) length = std::max(length, s.size());
  if (max_round) length = std::size_t{*max_round} + 1;
  std::vector<std::vector<double>> curves(cfg.protocols.size(), std::vector<double>(length, 0.0));
  for (std::size_t j = 0; j < sums.size(); ++j)
    for (std::size_t t = 0; t < length && t < sums[j].size(); ++t)
      curves[j][t] = static_cast<double>(sums[j][t]) / static_cast<double>(cfg.reps);
  return curves;
}

// ---------------------------------------------------------------------------
// Torus spread geometry

struct SpreadGeometry {
  NodeId informed_count = 1;
  /// Smallest radius around the start containing every informed vertex.
  double radius_out = 0.0;
  /// Largest vertex distance r such that every vertex within r is informed.
  double radius_in = 0.0;
  double radius_diff = 0.0;
  double normalized_diff = 0.0;
};

/// Euclidean distance on the torus using minimal wrap-around offsets.
inline double torus_distance(std::uint32_t side, NodeId from, NodeId to) {
  const auto s = static_cast<std::int64_t>(side);
  auto reduce = [s](std::int64_t d) {
    d %= s;
    if (d > s / 2) d -= s;
    if (d < -(s / 2)) d += s;
    return static_cast<double>(d);
  };
  const double da = reduce(static_cast<std::int64_t>(to / side) - static_cast<std::int64_t>(from / side));
  const double db = reduce(static_cast<std::int64_t>(to % side) - static_cast<std::int64_t>(from % side));
  return std::hypot(da, db);
}

inline NodeId torus_center(std::uint32_t side) { return torus_id(side, side / 2, side / 2); }

inline SpreadGeometry spread_geometry(std::uint32_t side, NodeId start, std::span<const std::uint8_t> informed) {
  SpreadGeometry geo;
  geo.informed_count = 0;
  double nearest_uninformed = std::numeric_limits<double>::infinity();
  std::vector<double> dist(informed.size());
  for (NodeId v = 0; v < informed.size(); ++v) {
    dist[v] = torus_distance(side, start, v);
    if (informed[v]) {
      ++geo.informed_count;
      geo.radius_out = std::max(geo.radius_out, dist[v]);
    } else {
      nearest_uninformed = std::min(nearest_uninformed, dist[v]);
    }
  }
  for (NodeId v = 0; v < informed.size(); ++v)
    if (informed[v] && dist[v] < nearest_uninformed) geo.radius_in = std::max(geo.radius_in, dist[v]);
  geo.radius_diff = geo.radius_out - geo.radius_in;
  geo.normalized_diff = geo.radius_diff / std::sqrt(static_cast<double>(geo.informed_count));
  return geo;
}

struct MeanStd {
  double mean = 0.0;
  double std_dev = 0.0;
};

struct SpreadSummary {
  MeanStd informed_count;
  MeanStd radius_in;
  MeanStd radius_out;
  MeanStd radius_diff;
  MeanStd normalized_diff;
  /// Informed cells (x, y) of run 0.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> first_snapshot;
  std::vector<SpreadGeometry> runs;
};

inline MeanStd mean_std(std::span<const double> xs) {
  const auto s = summarize(xs);
  return {s.mean, s.std_dev};
}

/// Synchronous lossless runs from the center vertex, stopped after `steps`
/// rounds; geometry of the informed set per run, then averaged.
inline SpreadSummary torus_spread(std::uint32_t side, const ProtocolConfig& protocol, std::uint32_t steps,
                                  std::uint64_t reps, std::uint64_t seed, unsigned threads = 1) {
  ExperimentConfig cfg;
  cfg.graph = spec::Torus{side};
  cfg.protocols = {protocol};
  cfg.reps = reps;
  cfg.resample_every = 1000;
  cfg.master_seed = seed;
  cfg.stop_after = steps;
  cfg.fixed_start = torus_center(side);
  cfg.threads = threads;

  SpreadSummary out;
  out.runs.resize(reps);
  for_each_run(cfg, [&](const RunInfo& info, const auto& trace) {
    if constexpr (std::is_same_v<std::decay_t<decltype(trace)>, RunTrace>) {
      std::vector<std::uint8_t> informed(trace.informed_round.size());
      for (std::size_t v = 0; v < informed.size(); ++v) informed[v] = trace.informed_round[v] <= steps;
      out.runs[info.run] = spread_geometry(side, info.start, informed);
      if (info.run == 0) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
        for (NodeId v = 0; v < informed.size(); ++v)
          if (informed[v]) cells.emplace_back(v / side, v % side);
        out.first_snapshot = std::move(cells);
      }
    }
  });
  auto column = [&](auto member) {
    std::vector<double> xs;
    xs.reserve(out.runs.size());
    for (const auto& g : out.runs) xs.push_back(static_cast<double>(g.*member));
    return mean_std(xs);
  };
  out.informed_count = column(&SpreadGeometry::informed_count);
  out.radius_in = column(&SpreadGeometry::radius_in);
  out.radius_out = column(&SpreadGeometry::radius_out);
  out.radius_diff = column(&SpreadGeometry::radius_diff);
  out.normalized_diff = column(&SpreadGeometry::normalized_diff);
  return out;
}

// ---------------------------------------------------------------------------
// Discrepancy sweep

inline std::vector<DirectionPermutation> all_permutations(std::uint32_t m) {
  DirectionPermutation x(m);
  std::iota(x.begin(), x.end(), 1u);
  std::vector<DirectionPermutation> out;
  do out.push_back(x);
  while (std::next_permutation(x.begin(), x.end()));
  return out;
}

/// `count` distinct uniform permutations of 1..m.
inline std::vector<DirectionPermutation> sample_permutations(std::uint32_t m, std::size_t count, RandomSource& rng) {
  double total = 1.0;
  for (std::uint32_t k = 2; k <= m; ++k) total *= k;
  if (static_cast<double>(count) > total) throw std::invalid_argument("more permutations requested than exist");
  std::set<DirectionPermutation> seen;
  std::vector<DirectionPermutation> out;
  DirectionPermutation x(m);
  while (out.size() < count) {
    std::iota(x.begin(), x.end(), 1u);
    for (std::size_t i = m; i > 1; --i) std::swap(x[i - 1], x[rng.uniform_index(i)]);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

struct DiscrepancyRow {
  DirectionPermutation perm;
  double disc1;
  double disc2;
  double mean_time;
};

struct DiscrepancySweep {
  std::vector<DiscrepancyRow> rows;
  double r2_l1;
  double r2_l2;
};

/// Mean quasirandom broadcast time from the torus center for every
/// direction permutation, against its L1 and L2 discrepancy.
inline DiscrepancySweep discrepancy_sweep(std::uint32_t side, std::span<const DirectionPermutation> perms,
                                          std::uint64_t reps_per_perm, std::uint64_t seed, unsigned threads = 1) {
  if (perms.size() < 2) throw std::invalid_argument("discrepancy sweep needs at least two permutations");
  DiscrepancySweep out;
  std::vector<double> d1, d2, means;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    ExperimentConfig cfg;
    cfg.graph = spec::Torus{side};
    cfg.protocols = {ProtocolConfig{Model::Quasirandom, lists::Explicit{perms[k]}, 1.0}};
    cfg.reps = reps_per_perm;
    cfg.resample_every = reps_per_perm;
    cfg.master_seed = derive_seed(seed, StreamPurpose::Permutation, k);
    cfg.fixed_start = torus_center(side);
    cfg.threads = threads;
    const auto est = estimate_broadcast(cfg);
    DiscrepancyRow row{perms[k], lp_discrepancy(perms[k], 1.0), lp_discrepancy(perms[k], 2.0),
                       est.protocols[0].stats.mean};
    d1.push_back(row.disc1);
    d2.push_back(row.disc2);
    means.push_back(row.mean_time);
    out.rows.push_back(std::move(row));
  }
  out.r2_l1 = pearson(d1, means).r_squared;
  out.r2_l2 = pearson(d2, means).r_squared;
  return out;
}

}  // namespace rumor
