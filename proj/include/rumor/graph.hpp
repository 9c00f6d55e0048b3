#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "rumor/random.hpp"

namespace rumor {

using NodeId = std::uint32_t;

enum class GraphKind { Complete, Hypercube, Torus, Gnp, RandomRegular, Custom };

/// Thrown when no connected sample was found within the attempt budget.
class GenerationFailure : public std::runtime_error {
public:
  explicit GenerationFailure(std::size_t attempts)
      : std::runtime_error("no connected graph after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}

  std::size_t attempts() const noexcept { return attempts_; }

private:
  std::size_t attempts_;
};

/// Undirected simple graph in compressed adjacency form. The per-node
/// neighbor order is the generator's order and doubles as the canonic list.
class Graph {
public:
  Graph() = default;

  /// Validates symmetry, absence of self-loops and duplicate entries.
  static Graph from_adjacency(const std::vector<std::vector<NodeId>>& adjacency,
                              GraphKind kind = GraphKind::Custom, std::uint32_t parameter = 0) {
    Graph g;
    g.kind_ = kind;
    g.parameter_ = parameter;
    const auto n = static_cast<NodeId>(adjacency.size());
    g.offsets_.reserve(n + 1);
    g.offsets_.push_back(0);
    std::size_t total = 0;
    for (const auto& row : adjacency) total += row.size();
    g.neighbors_.reserve(total);
    for (const auto& row : adjacency) {
      g.neighbors_.insert(g.neighbors_.end(), row.begin(), row.end());
      g.offsets_.push_back(g.neighbors_.size());
    }
    g.validate();
    return g;
  }

  NodeId node_count() const noexcept {
    return offsets_.empty() ? 0 : static_cast<NodeId>(offsets_.size() - 1);
  }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }
  std::size_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {neighbors_.data() + offsets_[u], degree(u)};
  }

  GraphKind kind() const noexcept { return kind_; }
  /// Dimension for hypercubes, side length for tori, zero otherwise.
  std::uint32_t parameter() const noexcept { return parameter_; }

  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<NodeId>& flat_neighbors() const noexcept { return neighbors_; }

  bool has_edge(NodeId u, NodeId v) const noexcept {
    const auto row = neighbors(u);
    return std::find(row.begin(), row.end(), v) != row.end();
  }

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  void validate() const {
    const NodeId n = node_count();
    std::vector<std::vector<NodeId>> sorted(n);
    for (NodeId u = 0; u < n; ++u) {
      auto row = neighbors(u);
      sorted[u].assign(row.begin(), row.end());
      std::sort(sorted[u].begin(), sorted[u].end());
      for (std::size_t i = 0; i < sorted[u].size(); ++i) {
        const NodeId v = sorted[u][i];
        if (v >= n) throw std::invalid_argument("neighbor id out of range");
        if (v == u) throw std::invalid_argument("self-loop at node " + std::to_string(u));
        if (i > 0 && sorted[u][i - 1] == v)
          throw std::invalid_argument("duplicate neighbor at node " + std::to_string(u));
      }
    }
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v : sorted[u])
        if (!std::binary_search(sorted[v].begin(), sorted[v].end(), u))
          throw std::invalid_argument("asymmetric adjacency between " + std::to_string(u) +
                                      " and " + std::to_string(v));
  }

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  GraphKind kind_ = GraphKind::Custom;
  std::uint32_t parameter_ = 0;
};

// ---------------------------------------------------------------------------
// Torus geometry

struct Direction {
  int da;
  int db;
};

/// Counterclockwise direction table starting at (1,0).
inline constexpr Direction kTorusDirections[8] = {
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
};

inline NodeId torus_id(std::uint32_t side, std::int64_t a, std::int64_t b) noexcept {
  const auto s = static_cast<std::int64_t>(side);
  a = ((a % s) + s) % s;
  b = ((b % s) + s) % s;
  return static_cast<NodeId>(a * s + b);
}

// ---------------------------------------------------------------------------
// Generators

inline Graph gen_complete(NodeId n) {
  if (n < 1) throw std::invalid_argument("complete graph needs n >= 1");
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId u = 0; u < n; ++u) {
    adj[u].reserve(n - 1);
    for (NodeId v = 0; v < n; ++v)
      if (v != u) adj[u].push_back(v);
  }
  return Graph::from_adjacency(adj, GraphKind::Complete, 0);
}

inline Graph gen_hypercube(std::uint32_t dimension) {
  if (dimension < 1 || dimension > 30) throw std::invalid_argument("hypercube dimension must be in [1,30]");
  const NodeId n = NodeId{1} << dimension;
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId u = 0; u < n; ++u) {
    adj[u].reserve(dimension);
    for (std::uint32_t i = 0; i < dimension; ++i) adj[u].push_back(u ^ (NodeId{1} << i));
  }
  return Graph::from_adjacency(adj, GraphKind::Hypercube, dimension);
}

/// Node (a,b) has id a*side + b; neighbors follow kTorusDirections.
inline Graph gen_torus(std::uint32_t side) {
  if (side < 3) throw std::invalid_argument("torus side must be >= 3");
  const NodeId n = side * side;
  std::vector<std::vector<NodeId>> adj(n);
  for (std::uint32_t a = 0; a < side; ++a)
    for (std::uint32_t b = 0; b < side; ++b) {
      auto& row = adj[a * side + b];
      row.reserve(8);
      for (const auto& d : kTorusDirections)
        row.push_back(torus_id(side, std::int64_t{a} + d.da, std::int64_t{b} + d.db));
    }
  return Graph::from_adjacency(adj, GraphKind::Torus, side);
}

/// Erdos-Renyi G(n,p) by geometric skipping over the pair sequence.
inline Graph gen_gnp(NodeId n, double p, RandomSource& rng) {
  if (n < 1) throw std::invalid_argument("gnp needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gnp needs p in [0,1]");
  std::vector<std::vector<NodeId>> adj(n);
  if (p >= 1.0) {
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v)
        if (u != v) adj[u].push_back(v);
  } else if (p > 0.0) {
    const double log_q = std::log1p(-p);
    // Pairs (v, w) with w < v, enumerated row by row.
    std::int64_t v = 1;
    std::int64_t w = -1;
    while (v < static_cast<std::int64_t>(n)) {
      const double skip = std::floor(std::log1p(-rng.uniform01()) / log_q);
      if (skip > static_cast<double>(n) * static_cast<double>(n)) break;
      w += 1 + static_cast<std::int64_t>(skip);
      while (w >= v && v < static_cast<std::int64_t>(n)) {
        w -= v;
        ++v;
      }
      if (v < static_cast<std::int64_t>(n)) {
        adj[v].push_back(static_cast<NodeId>(w));
        adj[w].push_back(static_cast<NodeId>(v));
      }
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
  }
  return Graph::from_adjacency(adj, GraphKind::Gnp, 0);
}

/// Random d-regular graph by the Steger-Wormald pairing procedure: pair
/// uniformly chosen remaining points, reject loops and multi-edges, restart
/// from scratch when no legal pair is left.
inline Graph gen_random_regular(NodeId n, std::uint32_t d, RandomSource& rng) {
  if (d < 1 || d >= n) throw std::invalid_argument("random regular graph needs 1 <= d < n");
  if ((static_cast<std::uint64_t>(n) * d) % 2 != 0) throw std::invalid_argument("n*d must be even");

  std::vector<std::vector<NodeId>> adj(n);
  std::vector<NodeId> points;
  auto adjacent = [&](NodeId u, NodeId v) {
    return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
  };
  auto suitable_pair_exists = [&] {
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (points[i] != points[j] && !adjacent(points[i], points[j])) return true;
    return false;
  };

  for (;;) {
    for (auto& row : adj) {
      row.clear();
      row.reserve(d);
    }
    points.clear();
    points.reserve(static_cast<std::size_t>(n) * d);
    for (NodeId u = 0; u < n; ++u)
      for (std::uint32_t k = 0; k < d; ++k) points.push_back(u);

    bool stuck = false;
    std::size_t failures = 0;
    while (!points.empty()) {
      auto i = static_cast<std::size_t>(rng.uniform_index(points.size()));
      auto j = static_cast<std::size_t>(rng.uniform_index(points.size()));
      const NodeId u = points[i];
      const NodeId v = points[j];
      if (i == j || u == v || adjacent(u, v)) {
        if (++failures > 16 * points.size() + 64) {
          if (!suitable_pair_exists()) {
            stuck = true;
            break;
          }
          failures = 0;
        }
        continue;
      }
      failures = 0;
      adj[u].push_back(v);
      adj[v].push_back(u);
      if (i < j) std::swap(i, j);
      points[i] = points.back();
      points.pop_back();
      points[j] = points.back();
      points.pop_back();
    }
    if (!stuck) break;
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return Graph::from_adjacency(adj, GraphKind::RandomRegular, d);
}

inline bool is_connected(const Graph& g) {
  const NodeId n = g.node_count();
  if (n <= 1) return true;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  NodeId reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == n;
}

// ---------------------------------------------------------------------------
// Graph specifications

namespace spec {
struct Complete {
  NodeId n;
  friend bool operator==(const Complete&, const Complete&) = default;
};
struct Hypercube {
  std::uint32_t dimension;
  friend bool operator==(const Hypercube&, const Hypercube&) = default;
};
struct Torus {
  std::uint32_t side;
  friend bool operator==(const Torus&, const Torus&) = default;
};
enum class Density { Literal, LnN, TwoLnN };
struct Gnp {
  NodeId n;
  double p;
  Density density = Density::Literal;
  friend bool operator==(const Gnp&, const Gnp&) = default;
};
struct RandomRegular {
  NodeId n;
  std::uint32_t degree;
  friend bool operator==(const RandomRegular&, const RandomRegular&) = default;
};
}  // namespace spec

using GraphSpec = std::variant<spec::Complete, spec::Hypercube, spec::Torus, spec::Gnp, spec::RandomRegular>;

/// p = ln(n)/n scaled by `factor`.
inline double log_density(NodeId n, double factor) {
  return n <= 1 ? 0.0 : factor * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

inline spec::Gnp make_gnp(NodeId n, spec::Density density, double literal_p = 0.0) {
  switch (density) {
    case spec::Density::LnN: return {n, log_density(n, 1.0), density};
    case spec::Density::TwoLnN: return {n, log_density(n, 2.0), density};
    case spec::Density::Literal: break;
  }
  return {n, literal_p, spec::Density::Literal};
}

inline NodeId node_count(const GraphSpec& s) {
  return std::visit(
      [](const auto& v) -> NodeId {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Hypercube>) return NodeId{1} << v.dimension;
        else if constexpr (std::is_same_v<T, spec::Torus>) return v.side * v.side;
        else return v.n;
      },
      s);
}

inline bool is_deterministic(const GraphSpec& s) {
  return std::holds_alternative<spec::Complete>(s) || std::holds_alternative<spec::Hypercube>(s) ||
         std::holds_alternative<spec::Torus>(s);
}

inline void validate(const GraphSpec& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Complete>) {
          if (v.n < 1) throw std::invalid_argument("complete: n must be >= 1");
        } else if constexpr (std::is_same_v<T, spec::Hypercube>) {
          if (v.dimension < 1 || v.dimension > 30) throw std::invalid_argument("hypercube: d must be in [1,30]");
        } else if constexpr (std::is_same_v<T, spec::Torus>) {
          if (v.side < 3 || v.side > 46340) throw std::invalid_argument("torus: side must be in [3,46340]");
        } else if constexpr (std::is_same_v<T, spec::Gnp>) {
          if (v.n < 1) throw std::invalid_argument("gnp: n must be >= 1");
          if (!(v.p >= 0.0 && v.p <= 1.0)) throw std::invalid_argument("gnp: p must be in [0,1]");
        } else {
          if (v.degree < 1 || v.degree >= v.n) throw std::invalid_argument("regular: need 1 <= d < n");
          if ((static_cast<std::uint64_t>(v.n) * v.degree) % 2 != 0)
            throw std::invalid_argument("regular: n*d must be even");
        }
      },
      s);
}

inline Graph generate(const GraphSpec& s, RandomSource& rng) {
  return std::visit(
      [&rng](const auto& v) -> Graph {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Complete>) return gen_complete(v.n);
        else if constexpr (std::is_same_v<T, spec::Hypercube>) return gen_hypercube(v.dimension);
        else if constexpr (std::is_same_v<T, spec::Torus>) return gen_torus(v.side);
        else if constexpr (std::is_same_v<T, spec::Gnp>) return gen_gnp(v.n, v.p, rng);
        else return gen_random_regular(v.n, v.degree, rng);
      },
      s);
}

inline constexpr std::size_t kDefaultMaxAttempts = 1000;

/// Draws from `s` until the sample is connected.
inline Graph sample_connected(const GraphSpec& s, RandomSource& rng,
                              std::size_t max_attempts = kDefaultMaxAttempts) {
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  validate(s);
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Graph g = generate(s, rng);
    if (is_connected(g)) return g;
    if (is_deterministic(s)) break;
  }
  throw GenerationFailure(is_deterministic(s) ? 1 : max_attempts);
}

// ---------------------------------------------------------------------------
// Text form: complete:N, hypercube:D, torus:S, gnp:N:P|lnn|2lnn, regular:N:D

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  for (;;) {
    const auto next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw std::invalid_argument("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses `lnn`, `2lnn` or a literal probability.
inline spec::Gnp parse_density(NodeId n, std::string_view text) {
  if (text == "lnn") return make_gnp(n, spec::Density::LnN);
  if (text == "2lnn") return make_gnp(n, spec::Density::TwoLnN);
  return make_gnp(n, spec::Density::Literal, detail::parse_number<double>(text, "probability"));
}

inline GraphSpec parse_graph_spec(std::string_view text) {
  const auto parts = detail::split(text, ':');
  const auto& family = parts[0];
  auto expect = [&](std::size_t count) {
    if (parts.size() != count)
      throw std::invalid_argument("malformed graph spec '" + std::string(text) + "'");
  };
  GraphSpec result;
  if (family == "complete") {
    expect(2);
    result = spec::Complete{detail::parse_number<NodeId>(parts[1], "node count")};
  } else if (family == "hypercube") {
    expect(2);
    result = spec::Hypercube{detail::parse_number<std::uint32_t>(parts[1], "dimension")};
  } else if (family == "torus") {
    expect(2);
    result = spec::Torus{detail::parse_number<std::uint32_t>(parts[1], "side")};
  } else if (family == "gnp") {
    expect(3);
    result = parse_density(detail::parse_number<NodeId>(parts[1], "node count"), parts[2]);
  } else if (family == "regular") {
    expect(3);
    result = spec::RandomRegular{detail::parse_number<NodeId>(parts[1], "node count"),
                                 detail::parse_number<std::uint32_t>(parts[2], "degree")};
  } else {
    throw std::invalid_argument("unknown graph family '" + std::string(family) + "'");
  }
  validate(result);
  return result;
}

inline std::string to_string(const GraphSpec& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Complete>) return "complete:" + std::to_string(v.n);
        else if constexpr (std::is_same_v<T, spec::Hypercube>) return "hypercube:" + std::to_string(v.dimension);
        else if constexpr (std::is_same_v<T, spec::Torus>) return "torus:" + std::to_string(v.side);
        else if constexpr (std::is_same_v<T, spec::Gnp>) {
          std::string p = v.density == spec::Density::LnN      ? "lnn"
                          : v.density == spec::Density::TwoLnN ? "2lnn"
                                                               : detail::format_double(v.p);
          return "gnp:" + std::to_string(v.n) + ":" + p;
        } else {
          return "regular:" + std::to_string(v.n) + ":" + std::to_string(v.degree);
        }
      },
      s);
}

}  // namespace rumor
