#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rumor/graph.hpp"
#include "rumor/random.hpp"

namespace rumor {

/// A direction permutation, 1-based values: entry i names the canonic
/// direction served i-th.
using DirectionPermutation = std::vector<std::uint32_t>;

namespace lists {
struct Canonic {
  friend bool operator==(const Canonic&, const Canonic&) = default;
};
struct RandomPerm {
  friend bool operator==(const RandomPerm&, const RandomPerm&) = default;
};
struct LowDiscrepancy {
  friend bool operator==(const LowDiscrepancy&, const LowDiscrepancy&) = default;
};
struct Explicit {
  DirectionPermutation x;
  friend bool operator==(const Explicit&, const Explicit&) = default;
};
}  // namespace lists

using ListPolicy = std::variant<lists::Canonic, lists::RandomPerm, lists::LowDiscrepancy, lists::Explicit>;

/// Per-node cyclic neighbor order. Shares the graph's offset layout.
class Schedule {
public:
  Schedule() = default;
  Schedule(std::vector<std::size_t> offsets, std::vector<NodeId> order, bool follows_adjacency = false)
      : offsets_(std::move(offsets)), order_(std::move(order)), follows_adjacency_(follows_adjacency) {}

  bool empty() const noexcept { return offsets_.empty(); }
  NodeId node_count() const noexcept {
    return offsets_.empty() ? 0 : static_cast<NodeId>(offsets_.size() - 1);
  }
  std::span<const NodeId> of(NodeId u) const noexcept {
    return {order_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  /// True when every node's sequence is a permutation of its adjacency.
  bool matches(const Graph& g) const {
    if (node_count() != g.node_count()) return false;
    std::vector<NodeId> a;
    std::vector<NodeId> b;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      auto row = of(u);
      auto adj = g.neighbors(u);
      if (row.size() != adj.size()) return false;
      a.assign(row.begin(), row.end());
      b.assign(adj.begin(), adj.end());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return false;
    }
    return true;
  }

  /// Set when every node's order equals its adjacency order.
  bool follows_adjacency() const noexcept { return follows_adjacency_; }

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.offsets_ == b.offsets_ && a.order_ == b.order_;
  }

private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> order_;
  bool follows_adjacency_ = false;
};

/// Generator order is the canonic order for every family: ascending ids with
/// the node itself skipped, flipped-bit index for hypercubes, the
/// counterclockwise direction table for tori.
inline Schedule canonic_schedule(const Graph& g) { return Schedule(g.offsets(), g.flat_neighbors(), true); }

/// Independent uniform permutation per node (Fisher-Yates).
inline Schedule random_schedule(const Graph& g, RandomSource& rng) {
  std::vector<NodeId> order = g.flat_neighbors();
  const auto& offsets = g.offsets();
  for (NodeId u = 0; u < g.node_count(); ++u) {
    NodeId* row = order.data() + offsets[u];
    const std::size_t len = offsets[u + 1] - offsets[u];
    for (std::size_t i = len; i > 1; --i) std::swap(row[i - 1], row[rng.uniform_index(i)]);
  }
  return Schedule(offsets, std::move(order));
}

inline bool is_permutation_of_1_to_m(std::span<const std::uint32_t> x) {
  std::vector<std::uint8_t> seen(x.size() + 1, 0);
  for (auto v : x) {
    if (v < 1 || v > x.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

/// Base-2 van der Corput sequence of length `source_length`, mapped to the
/// integers 1..source_length with entries above m deleted.
inline DirectionPermutation van_der_corput_direction_sequence(std::uint32_t m, std::uint32_t source_length) {
  if (m < 1) throw std::invalid_argument("van der Corput: m must be >= 1");
  if (!std::has_single_bit(source_length) || source_length < m)
    throw std::invalid_argument("van der Corput: source length must be a power of two >= m");
  const int bits = std::countr_zero(source_length);
  DirectionPermutation x;
  x.reserve(m);
  for (std::uint32_t k = 0; k < source_length; ++k) {
    std::uint32_t reversed = 0;
    for (int b = 0; b < bits; ++b)
      if (k & (1u << b)) reversed |= 1u << (bits - 1 - b);
    if (reversed + 1 <= m) x.push_back(reversed + 1);
  }
  return x;
}

/// Number of canonic directions for direction-structured graphs, 0 otherwise.
inline std::uint32_t direction_count(const Graph& g) {
  switch (g.kind()) {
    case GraphKind::Hypercube: return g.parameter();
    case GraphKind::Torus: return 8;
    default: return 0;
  }
}

/// Every node serves its canonic directions in the order x.
inline Schedule permuted_direction_schedule(const Graph& g, std::span<const std::uint32_t> x) {
  const std::uint32_t m = direction_count(g);
  if (m == 0) throw std::invalid_argument("direction lists need a hypercube or torus graph");
  if (x.size() != m || !is_permutation_of_1_to_m(x))
    throw std::invalid_argument("direction permutation must be a bijection on 1.." + std::to_string(m));
  std::vector<NodeId> order(g.flat_neighbors().size());
  const auto& offsets = g.offsets();
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto canonic = g.neighbors(u);
    for (std::uint32_t i = 0; i < m; ++i) order[offsets[u] + i] = canonic[x[i] - 1];
  }
  return Schedule(offsets, std::move(order));
}

/// Tori serve the van der Corput order one direction step further along the
/// table, x_i -> (x_i mod 8) + 1: axis pairs follow diagonal pairs. This
/// variant reproduces the reference low-discrepancy torus measurements; the
/// unshifted order is available as an explicit permutation.
inline constexpr std::uint32_t kTorusLowDiscrepancyShift = 1;

inline DirectionPermutation low_discrepancy_permutation(const Graph& g) {
  const std::uint32_t m = direction_count(g);
  if (m == 0) throw std::invalid_argument("low-discrepancy lists need a hypercube or torus graph");
  auto x = van_der_corput_direction_sequence(m, std::bit_ceil(m));
  if (g.kind() == GraphKind::Torus)
    for (auto& v : x) v = (v - 1 + kTorusLowDiscrepancyShift) % m + 1;
  return x;
}

inline Schedule build_schedule(const Graph& g, const ListPolicy& policy, RandomSource& rng) {
  return std::visit(
      [&](const auto& p) -> Schedule {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, lists::Canonic>) return canonic_schedule(g);
        else if constexpr (std::is_same_v<T, lists::RandomPerm>) return random_schedule(g, rng);
        else if constexpr (std::is_same_v<T, lists::LowDiscrepancy>)
          return permuted_direction_schedule(g, low_discrepancy_permutation(g));
        else return permuted_direction_schedule(g, p.x);
      },
      policy);
}

// ---------------------------------------------------------------------------
// Interval discrepancy

/// Cyclic interval of {1..m}: `length` consecutive values starting at
/// `start + 1`, wrapping past m. start is 0-based.
struct CyclicInterval {
  std::uint32_t start;
  std::uint32_t length;

  bool contains(std::uint32_t value, std::uint32_t m) const noexcept {
    return (value - 1 + m - start % m) % m < length;
  }
};

/// | |{x_i : i in I} ∩ J| - |I||J|/m |
inline double interval_discrepancy(std::span<const std::uint32_t> x, CyclicInterval I, CyclicInterval J) {
  const auto m = static_cast<std::uint32_t>(x.size());
  if (m == 0 || I.length < 1 || J.length < 1 || I.length > m || J.length > m)
    throw std::invalid_argument("intervals must be nonempty and at most m long");
  std::uint32_t hits = 0;
  for (std::uint32_t k = 0; k < I.length; ++k)
    if (J.contains(x[(I.start + k) % m], m)) ++hits;
  return std::abs(static_cast<double>(hits) - static_cast<double>(I.length) * J.length / m);
}

/// L_p norm of interval_discrepancy over all (start, length) cyclic interval
/// pairs, m^2 intervals per side. Requires m <= 64.
inline double lp_discrepancy(std::span<const std::uint32_t> x, double p) {
  const auto m = static_cast<std::uint32_t>(x.size());
  if (!(p > 0.0)) throw std::invalid_argument("L_p discrepancy needs p > 0");
  if (m == 0 || m > 64) throw std::invalid_argument("L_p discrepancy supports 1 <= m <= 64");
  auto interval_mask = [m](std::uint32_t start, std::uint32_t length) {
    std::uint64_t mask = 0;
    for (std::uint32_t k = 0; k < length; ++k) mask |= std::uint64_t{1} << ((start + k) % m);
    return mask;
  };
  // Value masks of J and image masks {x_i : i in I}, both over bit (value - 1).
  std::vector<std::uint64_t> value_masks;
  std::vector<std::uint64_t> image_masks;
  std::vector<std::uint32_t> lengths;
  value_masks.reserve(m * m);
  image_masks.reserve(m * m);
  for (std::uint32_t start = 0; start < m; ++start)
    for (std::uint32_t length = 1; length <= m; ++length) {
      value_masks.push_back(interval_mask(start, length));
      std::uint64_t image = 0;
      for (std::uint32_t k = 0; k < length; ++k) image |= std::uint64_t{1} << (x[(start + k) % m] - 1);
      image_masks.push_back(image);
      lengths.push_back(length);
    }
  double total = 0.0;
  for (std::size_t i = 0; i < image_masks.size(); ++i)
    for (std::size_t j = 0; j < value_masks.size(); ++j) {
      const double hits = std::popcount(image_masks[i] & value_masks[j]);
      const double d = std::abs(hits - static_cast<double>(lengths[i]) * lengths[j] / m);
      total += p == 1.0 ? d : std::pow(d, p);
    }
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

/// Parses "1,5,3,7,2,6,4,8".
inline DirectionPermutation parse_permutation(std::string_view text) {
  DirectionPermutation x;
  for (auto part : detail::split(text, ',')) x.push_back(detail::parse_number<std::uint32_t>(part, "permutation entry"));
  if (!is_permutation_of_1_to_m(x)) throw std::invalid_argument("'" + std::string(text) + "' is not a permutation of 1..m");
  return x;
}

inline std::string format_permutation(std::span<const std::uint32_t> x, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(x[i]);
  }
  return out;
}

/// canonic | random | lowdisc | explicit:<perm>
inline ListPolicy parse_list_policy(std::string_view text) {
  if (text == "canonic") return lists::Canonic{};
  if (text == "random") return lists::RandomPerm{};
  if (text == "lowdisc") return lists::LowDiscrepancy{};
  if (text.starts_with("explicit:")) return lists::Explicit{parse_permutation(text.substr(9))};
  throw std::invalid_argument("unknown list policy '" + std::string(text) + "'");
}

inline std::string to_string(const ListPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, lists::Canonic>) return "canonic";
        else if constexpr (std::is_same_v<T, lists::RandomPerm>) return "random";
        else if constexpr (std::is_same_v<T, lists::LowDiscrepancy>) return "lowdisc";
        else return "explicit:" + format_permutation(p.x);
      },
      policy);
}

}  // namespace rumor
