#include "hxmesh/routing.hpp"

#include <algorithm>
#include <unordered_set>

namespace hxmesh {

NodeId channel_source(const Topology& t, ChannelId c) {
  const Link& k = t.link(channel_link(c));
  return (c & 1) ? k.v : k.u;
}

NodeId channel_target(const Topology& t, ChannelId c) {
  const Link& k = t.link(channel_link(c));
  return (c & 1) ? k.u : k.v;
}

Router::Router(const Topology& t, RoutingScheme scheme, int plane)
    : t_(t),
      scheme_(scheme),
      plane_(plane),
      hx_rules_(t.is_hxmesh() && scheme == RoutingScheme::kMinimalAdaptive) {
  require(plane >= 0 && plane < t.planes(), "plane out of range");
  if (scheme == RoutingScheme::kDimensionOrder) {
    require(t.has_ports(), "dimension-order routing needs a grid topology");
  }
  const std::size_t n = std::max<std::size_t>(t.node_count(), 1);
  cache_budget_ = std::max<std::size_t>(4, (std::size_t{1} << 25) / n);
}

void Router::set_allowed(std::vector<char> allowed) {
  require(allowed.empty() || allowed.size() == t_.node_count(),
          "allowed mask must cover every node");
  allowed_ = std::move(allowed);
}

const std::vector<int>& Router::distances_to(NodeId dst) {
  auto it = dist_cache_.find(dst);
  if (it != dist_cache_.end()) return it->second;
  if (dist_cache_.size() >= cache_budget_) dist_cache_.clear();
  return dist_cache_.emplace(dst, bfs_distances(t_, dst, plane_)).first->second;
}

bool Router::step(const State& s, const Adjacent& adj, NodeId dst,
                  State& next) const {
  const NodeId u = s.node;
  const NodeId v = adj.neighbor;
  const Link& k = t_.link(adj.link);
  const bool ua = t_.is_accelerator(u);
  const bool va = t_.is_accelerator(v);
  next = {v, s.vc, 0};
  if (scheme_ == RoutingScheme::kDimensionOrder) {
    if (!ua || !va) return true;
    const Node& from = t_.node(u);
    const Node& to = t_.node(dst);
    const Port p = t_.port_at(adj.link, u);
    const auto& lay = t_.layout();
    auto prefer = [](int delta, int size, Port plus, Port minus) {
      const int fwd = ((delta % size) + size) % size;
      return fwd <= size - fwd ? plus : minus;
    };
    if (from.gx != to.gx) {
      return p == prefer(to.gx - from.gx, lay.grid_width, Port::kEast, Port::kWest);
    }
    return p == prefer(to.gy - from.gy, lay.grid_height, Port::kNorth, Port::kSouth);
  }
  if (!hx_rules_) return true;
  if (ua && va && k.medium == Medium::kPcb) {
    // North-last on the board: once moving north, keep moving north.
    const Port p = t_.port_at(adj.link, u);
    if (s.north && p != Port::kNorth) return false;
    next.north = s.north || p == Port::kNorth;
    return true;
  }
  if (ua) {
    // Leaving the board (switch or wrap cable) moves to the next VC.
    if (s.vc >= 2) return false;
    next.vc = static_cast<std::int8_t>(s.vc + 1);
  }
  return true;
}

void Router::build_dag(NodeId src, NodeId dst, Dag& dag) {
  require(src >= 0 && dst >= 0 && src < t_.accelerator_count() &&
              dst < t_.accelerator_count(),
          "route endpoints must be accelerators");
  require(src != dst, "route endpoints must differ");
  const std::vector<int>& dist = distances_to(dst);
  if (dist[src] < 0) {
    fail(ErrorCode::kUnreachable, "no path from " + std::to_string(src) + " to " +
                                      std::to_string(dst));
  }
  dag.states.clear();
  dag.edges.clear();
  std::unordered_map<std::uint64_t, std::int32_t> index;
  auto key = [](const State& s) {
    return (static_cast<std::uint64_t>(s.node) << 4) |
           (static_cast<std::uint64_t>(s.vc) << 1) | static_cast<std::uint64_t>(s.north);
  };
  std::vector<std::int32_t> first_edge;
  dag.states.push_back({src, 0, 0});
  index.emplace(key(dag.states[0]), 0);
  for (std::size_t i = 0; i < dag.states.size(); ++i) {
    first_edge.push_back(static_cast<std::int32_t>(dag.edges.size()));
    const State s = dag.states[i];
    if (s.node == dst) continue;
    const int here = dist[s.node];
    for (const Adjacent& adj : t_.neighbors(s.node, plane_)) {
      const NodeId v = adj.neighbor;
      if (dist[v] != here - 1) continue;
      if (v != dst && t_.is_accelerator(v) && !allowed_.empty() && !allowed_[v]) {
        continue;
      }
      State next;
      if (!step(s, adj, dst, next)) continue;
      auto [it, inserted] =
          index.emplace(key(next), static_cast<std::int32_t>(dag.states.size()));
      if (inserted) dag.states.push_back(next);
      dag.edges.push_back({static_cast<std::int32_t>(i), it->second,
                           channel_of(t_, adj.link, s.node)});
    }
  }
  first_edge.push_back(static_cast<std::int32_t>(dag.edges.size()));
  const std::size_t n = dag.states.size();
  dag.backward.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    if (dag.states[i].node == dst) {
      dag.backward[i] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (int e = first_edge[i]; e < first_edge[i + 1]; ++e) {
      sum += dag.backward[dag.edges[e].to];
    }
    dag.backward[i] = sum;
  }
  dag.forward.assign(n, 0.0);
  dag.forward[0] = 1.0;
  for (const Edge& e : dag.edges) dag.forward[e.to] += dag.forward[e.from];
  dag.total = dag.backward[0];
  if (dag.total <= 0.0) {
    fail(ErrorCode::kUnreachable, "no admissible minimal path from " +
                                      std::to_string(src) + " to " + std::to_string(dst));
  }
}

double Router::path_count(NodeId src, NodeId dst) {
  build_dag(src, dst, dag_);
  return dag_.total;
}

std::vector<Path> Router::candidate_paths(NodeId src, NodeId dst, std::size_t limit) {
  build_dag(src, dst, dag_);
  if (dag_.total > static_cast<double>(limit)) {
    fail(ErrorCode::kTooLarge, "path set exceeds enumeration limit");
  }
  std::vector<std::vector<std::int32_t>> out(dag_.states.size());
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(dag_.edges.size()); ++e) {
    if (dag_.backward[dag_.edges[e].to] > 0.0) out[dag_.edges[e].from].push_back(e);
  }
  std::vector<Path> paths;
  Path current;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [state, next] = stack.back();
    if (dag_.states[state].node == dst) {
      paths.push_back(current);
      stack.pop_back();
      if (!current.hops.empty()) current.hops.pop_back();
      continue;
    }
    if (next == out[state].size()) {
      stack.pop_back();
      if (!current.hops.empty()) current.hops.pop_back();
      continue;
    }
    const Edge& e = dag_.edges[out[state][next++]];
    current.hops.push_back({e.channel, dag_.states[e.to].vc});
    stack.push_back({e.to, 0});
  }
  return paths;
}

std::vector<ChannelWeight> Router::channel_weights(NodeId src, NodeId dst) {
  build_dag(src, dst, dag_);
  std::vector<ChannelWeight> w;
  w.reserve(dag_.edges.size());
  for (const Edge& e : dag_.edges) {
    const double share = dag_.forward[e.from] * dag_.backward[e.to];
    if (share > 0.0) w.push_back({e.channel, share / dag_.total});
  }
  std::sort(w.begin(), w.end(),
            [](const ChannelWeight& a, const ChannelWeight& b) { return a.channel < b.channel; });
  std::size_t o = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (o > 0 && w[o - 1].channel == w[i].channel) {
      w[o - 1].weight += w[i].weight;
    } else {
      w[o++] = w[i];
    }
  }
  w.resize(o);
  return w;
}

void Router::for_each_dependency(NodeId src, NodeId dst, const DependencyFn& fn) {
  build_dag(src, dst, dag_);
  const std::size_t n = dag_.states.size();
  std::vector<std::vector<std::int32_t>> in(n), out(n);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(dag_.edges.size()); ++e) {
    const Edge& x = dag_.edges[e];
    if (dag_.backward[x.to] <= 0.0) continue;
    in[x.to].push_back(e);
    out[x.from].push_back(e);
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::int32_t a : in[s]) {
      const Hop from{dag_.edges[a].channel, dag_.states[s].vc};
      for (std::int32_t b : out[s]) {
        const Edge& x = dag_.edges[b];
        fn(from, Hop{x.channel, dag_.states[x.to].vc});
      }
    }
  }
}

Path assign_virtual_channels(const Topology& t, const Path& p) {
  Path out = p;
  int vc = 0;
  for (Hop& h : out.hops) {
    const NodeId from = channel_source(t, h.channel);
    if (t.is_accelerator(from) && t.link(channel_link(h.channel)).medium != Medium::kPcb) {
      ++vc;
    }
    if (vc > 2) {
      fail(ErrorCode::kConstraintViolation, "path leaves a board more than twice");
    }
    h.vc = vc;
  }
  return out;
}

DeadlockReport deadlock_check(const Topology& t, RoutingScheme scheme,
                              std::size_t channel_limit) {
  std::size_t channels = 0;
  for (const Link& k : t.links()) channels += k.plane == 0 ? 2 : 0;
  if (channels > channel_limit) {
    fail(ErrorCode::kTooLarge, "CDG has " + std::to_string(channels) +
                                   " channels, limit " + std::to_string(channel_limit));
  }
  constexpr int kVcs = 3;
  const std::size_t nodes = 2 * t.link_count() * kVcs;
  auto id = [](const Hop& h) { return static_cast<std::size_t>(h.channel) * kVcs + h.vc; };
  std::vector<std::vector<std::uint32_t>> adj(nodes);
  std::unordered_set<std::uint64_t> seen;
  std::vector<char> used(nodes, 0);
  DeadlockReport report;
  Router router(t, scheme, 0);
  const int n = t.accelerator_count();
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s == d) continue;
      router.for_each_dependency(s, d, [&](Hop a, Hop b) {
        report.max_vc = std::max({report.max_vc, a.vc, b.vc});
        const std::uint64_t key = (static_cast<std::uint64_t>(id(a)) << 32) | id(b);
        if (seen.insert(key).second) {
          adj[id(a)].push_back(static_cast<std::uint32_t>(id(b)));
          used[id(a)] = used[id(b)] = 1;
        }
      });
    }
  }
  report.cdg_edges = seen.size();
  report.cdg_nodes = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));

  // Iterative three-colour DFS; a grey successor closes a cycle.
  std::vector<std::uint8_t> colour(nodes, 0);
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::size_t root = 0; root < nodes && report.acyclic; ++root) {
    if (!used[root] || colour[root] != 0) continue;
    stack.push_back({static_cast<std::uint32_t>(root), 0});
    colour[root] = 1;
    while (!stack.empty() && report.acyclic) {
      auto& [u, i] = stack.back();
      if (i == adj[u].size()) {
        colour[u] = 2;
        stack.pop_back();
        continue;
      }
      const std::uint32_t v = adj[u][i++];
      if (colour[v] == 0) {
        colour[v] = 1;
        stack.push_back({v, 0});
      } else if (colour[v] == 1) {
        report.acyclic = false;
        auto it = std::find_if(stack.begin(), stack.end(),
                               [&](const auto& e) { return e.first == v; });
        for (; it != stack.end(); ++it) {
          report.witness.push_back({static_cast<ChannelId>(it->first / kVcs),
                                    static_cast<int>(it->first % kVcs)});
        }
      }
    }
  }
  return report;
}

nlohmann::json path_to_json(const Topology& t, const Path& p) {
  nlohmann::json hops = nlohmann::json::array();
  for (const Hop& h : p.hops) {
    hops.push_back({{"link", channel_link(h.channel)},
                    {"from", channel_source(t, h.channel)},
                    {"to", channel_target(t, h.channel)},
                    {"vc", h.vc}});
  }
  return hops;
}

}  // namespace hxmesh
