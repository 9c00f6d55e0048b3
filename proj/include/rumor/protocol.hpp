#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rumor/graph.hpp"
#include "rumor/schedule.hpp"

namespace rumor {

enum class Model { FullyRandom, Quasirandom };

inline std::string_view to_string(Model m) { return m == Model::FullyRandom ? "random" : "quasi"; }

inline Model parse_model(std::string_view text) {
  if (text == "random") return Model::FullyRandom;
  if (text == "quasi") return Model::Quasirandom;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

/// Push protocol variant plus per-transmission success probability f.
/// `lists` only matters for the quasirandom model.
struct ProtocolConfig {
  Model model = Model::FullyRandom;
  ListPolicy lists = lists::Canonic{};
  double success_prob = 1.0;

  void validate() const {
    if (!(success_prob > 0.0 && success_prob <= 1.0))
      throw std::invalid_argument("success probability must be in (0,1]");
  }

  bool lossless() const noexcept { return success_prob >= 1.0; }

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Human-readable protocol label, e.g. "quasi/lowdisc".
inline std::string label(const ProtocolConfig& cfg) {
  std::string out(to_string(cfg.model));
  if (cfg.model == Model::Quasirandom) out += "/" + to_string(cfg.lists);
  return out;
}

struct Transmission {
  NodeId sender;
  NodeId target;
  bool delivered;
};

/// Optional per-transmission hook, used by tests and diagnostics.
using TransmissionObserver = std::function<void(const Transmission&)>;

inline constexpr std::uint32_t kNeverInformed = std::numeric_limits<std::uint32_t>::max();

/// Uninformed-neighbor counters cost O(edges) per run; they only pay off on
/// sparse graphs, so pruning is limited to average degree <= 64.
inline bool pruning_worthwhile(const Graph& g) {
  return g.flat_neighbors().size() <= std::size_t{64} * g.node_count();
}

/// k-th neighbor of u in a complete graph's ascending adjacency, without
/// touching the adjacency array.
inline constexpr NodeId complete_neighbor(NodeId u, NodeId k) noexcept { return k < u ? k : k + 1; }

/// Thrown when a synchronous run exceeds its round cap.
class NonTermination : public std::runtime_error {
public:
  explicit NonTermination(std::uint32_t cap)
      : std::runtime_error("broadcast did not finish within " + std::to_string(cap) + " rounds") {}
};

}  // namespace rumor
