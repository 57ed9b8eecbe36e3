#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hxmesh/topology.hpp"

namespace hxmesh {

// Directed channel: link traversed u->v (even) or v->u (odd).
using ChannelId = std::int32_t;

inline ChannelId channel_of(const Topology& t, LinkId l, NodeId from) {
  return 2 * l + (t.link(l).u == from ? 0 : 1);
}
inline LinkId channel_link(ChannelId c) { return c / 2; }
NodeId channel_source(const Topology& t, ChannelId c);
NodeId channel_target(const Topology& t, ChannelId c);

struct Hop {
  ChannelId channel;
  int vc = 0;
  friend bool operator==(const Hop&, const Hop&) = default;
};

struct Path {
  std::vector<Hop> hops;
  std::size_t size() const { return hops.size(); }
};

enum class RoutingScheme {
  kMinimalAdaptive,  // HxMesh rules on HxMesh, all shortest paths elsewhere
  kDimensionOrder,  // X then Y on grid families, single VC
};

struct ChannelWeight {
  ChannelId channel;
  double weight;  // fraction of the flow crossing this channel
};

class Router {
 public:
  explicit Router(const Topology& t, RoutingScheme scheme = RoutingScheme::kMinimalAdaptive,
                  int plane = 0);

  const Topology& topology() const { return t_; }
  int plane() const { return plane_; }

  // Restrict transit to accelerators flagged in `allowed` (switches always
  // pass). Empty vector lifts the restriction.
  void set_allowed(std::vector<char> allowed);

  double path_count(NodeId src, NodeId dst);
  std::vector<Path> candidate_paths(NodeId src, NodeId dst,
                                    std::size_t limit = 1'000'000);
  // Uniform split over all candidate paths, without enumerating them.
  std::vector<ChannelWeight> channel_weights(NodeId src, NodeId dst);

  using DependencyFn = std::function<void(Hop from, Hop to)>;
  // Channel pairs occupied consecutively by some candidate path.
  void for_each_dependency(NodeId src, NodeId dst, const DependencyFn& fn);

  const std::vector<int>& distances_to(NodeId dst);

 private:
  struct State {
    NodeId node;
    std::int8_t vc;
    std::int8_t north;
  };
  struct Edge {
    std::int32_t from;
    std::int32_t to;
    ChannelId channel;
  };
  struct Dag {
    std::vector<State> states;
    std::vector<Edge> edges;
    std::vector<double> forward;  // prefixes reaching a state
    std::vector<double> backward;  // completions from a state
    double total = 0.0;
  };

  void build_dag(NodeId src, NodeId dst, Dag& dag);
  bool step(const State& s, const Adjacent& adj, NodeId dst, State& next) const;

  const Topology& t_;
  RoutingScheme scheme_;
  int plane_;
  bool hx_rules_;
  std::vector<char> allowed_;
  std::unordered_map<NodeId, std::vector<int>> dist_cache_;
  std::size_t cache_budget_;
  Dag dag_;
};

// Recomputes VCs along a path: +1 at every injection from an accelerator
// into a switch or over an inter-board cable.
Path assign_virtual_channels(const Topology& t, const Path& p);

struct DeadlockReport {
  bool acyclic = true;
  std::vector<Hop> witness;  // cycle of (channel, vc) nodes when cyclic
  std::size_t cdg_nodes = 0;
  std::size_t cdg_edges = 0;
  int max_vc = 0;
};

DeadlockReport deadlock_check(const Topology& t, RoutingScheme scheme,
                              std::size_t channel_limit = 40000);

nlohmann::json path_to_json(const Topology& t, const Path& p);

}  // namespace hxmesh
