#include "hxmesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace hxmesh {

EquipmentCount count_equipment(const Topology& t) {
  EquipmentCount e;
  std::set<int> physical;
  for (const Node& n : t.nodes()) {
    if (n.kind == NodeKind::kSwitch) physical.insert(n.physical);
  }
  e.switches = static_cast<long long>(physical.size());
  for (const Link& k : t.links()) {
    switch (k.medium) {
      case Medium::kDac: ++e.dac; break;
      case Medium::kAoc: ++e.aoc; break;
      case Medium::kPcb: ++e.pcb; break;
    }
  }
  return e;
}

PriceTable PriceTable::from_json(const nlohmann::json& j) {
  PriceTable p;
  try {
    p.switch_usd = j.value("switch", p.switch_usd);
    p.aoc_usd = j.value("aoc", p.aoc_usd);
    p.dac_usd = j.value("dac", p.dac_usd);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("price table: ") + e.what());
  }
  return p;
}

double price(const EquipmentCount& e, const PriceTable& prices) {
  return static_cast<double>(e.switches) * prices.switch_usd +
         static_cast<double>(e.aoc) * prices.aoc_usd +
         static_cast<double>(e.dac) * prices.dac_usd;
}

namespace {

// Hop diameter of the connector spanning `boards` boards along one line.
int connector_hops(int boards, int radix) {
  const double leaves = 2.0 * boards / radix;
  int levels = static_cast<int>(std::ceil(std::log(leaves) / std::log(radix / 2.0) - 1e-12));
  levels = std::max(levels, 0);
  return 2 * (levels + 1);
}

}  // namespace

int analytic_diameter(const HxMeshParams& p) {
  require(p.x >= 2 && p.y >= 2, "analytic diameter needs at least 2x2 boards");
  return 2 * ((p.a - 1) / 2 + (p.b - 1) / 2) + connector_hops(p.x, p.radix) +
         connector_hops(p.y, p.radix);
}

int bfs_diameter(const Topology& t, int plane) {
  const int n_acc = t.accelerator_count();
  require(n_acc > 0, "topology has no accelerators");
  // Accelerators hanging off a single switch port share that switch's BFS.
  std::vector<NodeId> sources;
  std::vector<char> seen(t.node_count(), 0);
  for (NodeId a = 0; a < n_acc; ++a) {
    auto adj = t.neighbors(a, plane);
    if (adj.size() == 1 && !t.is_accelerator(adj[0].neighbor)) {
      if (!seen[adj[0].neighbor]) {
        seen[adj[0].neighbor] = 1;
        sources.push_back(adj[0].neighbor);
      }
    } else {
      sources.push_back(a);
    }
  }
  int diameter = 0;
  std::vector<int> dist(t.node_count());
  std::vector<NodeId> queue(t.node_count());
  for (NodeId s : sources) {
    std::fill(dist.begin(), dist.end(), -1);
    std::size_t head = 0, tail = 0;
    dist[s] = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (const Adjacent& a : t.neighbors(u, plane)) {
        if (dist[a.neighbor] < 0) {
          dist[a.neighbor] = dist[u] + 1;
          queue[tail++] = a.neighbor;
        }
      }
    }
    const int offset = t.is_accelerator(s) ? 0 : 1;
    for (NodeId a = 0; a < n_acc; ++a) {
      if (dist[a] < 0) {
        fail(ErrorCode::kUnreachable, "plane " + std::to_string(plane) +
                                          " is disconnected");
      }
      if (a != s) diameter = std::max(diameter, dist[a] + offset);
    }
  }
  return diameter;
}

double relative_bisection(const HxMeshParams& p) {
  require(p.a == p.b, "relative bisection assumes square boards");
  require(p.x <= p.y && p.y % 2 == 0, "relative bisection needs x <= y and even y");
  // Cutting the columns between board rows y/2-1 and y/2 severs a*x*y links
  // per plane while half the machine injects over 2*a*a*x*y links.
  const double cut = static_cast<double>(p.a) * p.x * p.y;
  const double injection = 2.0 * p.a * p.b * p.x * p.y;
  return cut / injection;
}

namespace {

// Unit-capacity max flow on a small undirected graph.
class SmallMaxFlow {
 public:
  explicit SmallMaxFlow(int n) : adj_(n) {}
  void add_edge(int u, int v, int cap) {
    adj_[u].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, cap});
  }
  int run(int s, int t) {
    int flow = 0;
    const int n = static_cast<int>(adj_.size());
    std::vector<int> parent_edge(n);
    std::vector<int> queue(n);
    while (true) {
      std::fill(parent_edge.begin(), parent_edge.end(), -1);
      std::size_t head = 0, tail = 0;
      queue[tail++] = s;
      parent_edge[s] = -2;
      while (head < tail && parent_edge[t] == -1) {
        const int u = queue[head++];
        for (int e : adj_[u]) {
          const int v = edges_[e].to;
          if (edges_[e].cap > 0 && parent_edge[v] == -1) {
            parent_edge[v] = e;
            queue[tail++] = v;
          }
        }
      }
      if (parent_edge[t] == -1) return flow;
      for (int v = t; v != s;) {
        const int e = parent_edge[v];
        --edges_[e].cap;
        ++edges_[e ^ 1].cap;
        v = edges_[e ^ 1].to;
      }
      ++flow;
    }
  }

 private:
  struct Edge {
    int to;
    int cap;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

MinCut mincut_bisection_oracle(const Topology& t) {
  const int n = t.accelerator_count();
  if (n > 24) {
    fail(ErrorCode::kTooLarge, "min-cut oracle is limited to 24 accelerators");
  }
  require(n >= 2 && n % 2 == 0, "min-cut oracle needs an even accelerator count");
  std::vector<std::pair<int, int>> acc_links;
  std::vector<std::vector<int>> switch_ports;  // per switch: attached accelerators
  std::vector<int> switch_index(t.node_count(), -1);
  std::vector<std::pair<int, int>> switch_links;
  bool switch_mesh = false;
  int injection_links = 0;
  for (LinkId l = 0; l < static_cast<LinkId>(t.link_count()); ++l) {
    const Link& k = t.link(l);
    if (k.plane != 0) continue;
    const bool ua = t.is_accelerator(k.u);
    const bool va = t.is_accelerator(k.v);
    injection_links += ua + va;
    auto sw = [&](NodeId s) {
      if (switch_index[s] < 0) {
        switch_index[s] = static_cast<int>(switch_ports.size());
        switch_ports.emplace_back();
      }
      return switch_index[s];
    };
    if (ua && va) {
      acc_links.push_back({k.u, k.v});
    } else if (ua) {
      switch_ports[sw(k.v)].push_back(k.u);
    } else if (va) {
      switch_ports[sw(k.u)].push_back(k.v);
    } else {
      switch_links.push_back({sw(k.u), sw(k.v)});
      switch_mesh = true;
    }
  }
  const int half = n / 2;
  long long best = std::numeric_limits<long long>::max();
  // Accelerator 0 stays on side A; enumerate the other members of A.
  std::vector<int> pick(half - 1);
  for (int i = 0; i < half - 1; ++i) pick[i] = i + 1;
  std::vector<char> side(n);
  while (true) {
    std::fill(side.begin(), side.end(), 1);
    side[0] = 0;
    for (int p : pick) side[p] = 0;
    long long cut = 0;
    for (auto [u, v] : acc_links) cut += side[u] != side[v];
    if (!switch_mesh) {
      for (const auto& ports : switch_ports) {
        int in_a = 0;
        for (int a : ports) in_a += side[a] == 0;
        cut += std::min<long long>(in_a, static_cast<long long>(ports.size()) - in_a);
      }
    } else if (cut < best) {
      const int ns = static_cast<int>(switch_ports.size());
      SmallMaxFlow mf(ns + 2);
      const int src = ns, dst = ns + 1;
      for (int s = 0; s < ns; ++s) {
        for (int a : switch_ports[s]) mf.add_edge(side[a] == 0 ? src : dst, s, 1);
      }
      for (auto [u, v] : switch_links) mf.add_edge(u, v, 1);
      cut += mf.run(src, dst);
    } else {
      cut = best;
    }
    best = std::min(best, cut);
    int i = half - 2;
    while (i >= 0 && pick[i] == n - (half - 1) + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < half - 1; ++j) pick[j] = pick[j - 1] + 1;
  }
  MinCut out;
  out.links = best;
  out.relative = static_cast<double>(best) / (injection_links / 2.0);
  return out;
}

const std::vector<TableRow>& published_table() {
  static const std::vector<TableRow> rows = {
      {"nonblocking_ft", SizeClass::kSmall, 25.3, 4},
      {"taper50_ft", SizeClass::kSmall, 17.6, 4},
      {"taper75_ft", SizeClass::kSmall, 13.2, 4},
      {"dragonfly", SizeClass::kSmall, 27.9, 3},
      {"hyperx", SizeClass::kSmall, 10.8, 4},
      {"hx2mesh", SizeClass::kSmall, 5.4, 4},
      {"hx4mesh", SizeClass::kSmall, 2.7, 8},
      {"torus", SizeClass::kSmall, 2.5, 32},
      {"nonblocking_ft", SizeClass::kLarge, 680.0, 6},
      {"taper50_ft", SizeClass::kLarge, 419.0, 6},
      {"taper75_ft", SizeClass::kLarge, 271.0, 6},
      {"dragonfly", SizeClass::kLarge, 429.0, 5},
      {"hyperx", SizeClass::kLarge, 448.0, 8},
      {"hx2mesh", SizeClass::kLarge, 224.0, 8},
      {"hx4mesh", SizeClass::kLarge, 43.3, 8},
      {"torus", SizeClass::kLarge, 39.5, 128},
  };
  return rows;
}

const TableRow& published_row(const std::string& label, SizeClass size) {
  for (const auto& r : published_table()) {
    if (r.label == label && r.size == size) return r;
  }
  fail(ErrorCode::kInvalidArgument, "no published row for '" + label + "'");
}

CostReport cost_of(const ReferenceConfig& cfg, const PriceTable& prices) {
  const Topology t = build_topology(cfg.spec);
  CostReport r;
  r.label = cfg.label;
  r.size = cfg.size;
  r.equipment = count_equipment(t);
  r.cost_usd = price(r.equipment, prices);
  if (t.family() == Family::kTorus2d) {
    EquipmentCount alt = r.equipment;
    alt.dac += alt.aoc;
    alt.aoc = 0;
    r.alt_cost_usd = price(alt, prices);
  }
  r.published_musd = published_row(cfg.label, cfg.size).cost_musd;
  r.relative_error =
      std::abs(r.cost_usd / 1e6 - r.published_musd) / r.published_musd;
  return r;
}

std::vector<CostReport> cost_suite(const PriceTable& prices) {
  std::vector<CostReport> out;
  for (const auto& cfg : reference_configs()) out.push_back(cost_of(cfg, prices));
  return out;
}

}  // namespace hxmesh
