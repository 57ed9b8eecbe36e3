#include "hxmesh/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <utility>

namespace hxmesh {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConstraintViolation: return "constraint_violation";
    case ErrorCode::kRadixOverflow: return "radix_overflow";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kTooLarge: return "too_large";
    case ErrorCode::kNotConstructible: return "not_constructible";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kFileNotFound: return "file_not_found";
  }
  return "unknown";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::kHxMesh: return "hxmesh";
    case Family::kHyperX: return "hyperx";
    case Family::kFatTree: return "fat_tree";
    case Family::kDragonfly: return "dragonfly";
    case Family::kTorus2d: return "torus2d";
  }
  return "?";
}

const char* to_string(Medium m) {
  switch (m) {
    case Medium::kPcb: return "pcb";
    case Medium::kDac: return "dac";
    case Medium::kAoc: return "aoc";
  }
  return "?";
}

const char* to_string(Port p) {
  switch (p) {
    case Port::kEast: return "E";
    case Port::kWest: return "W";
    case Port::kNorth: return "N";
    case Port::kSouth: return "S";
    case Port::kNone: return "-";
  }
  return "?";
}

Port opposite(Port p) {
  switch (p) {
    case Port::kEast: return Port::kWest;
    case Port::kWest: return Port::kEast;
    case Port::kNorth: return Port::kSouth;
    case Port::kSouth: return Port::kNorth;
    case Port::kNone: return Port::kNone;
  }
  return Port::kNone;
}

const char* to_string(FindingKind k) {
  switch (k) {
    case FindingKind::kPortBudget: return "port_budget";
    case FindingKind::kRadix: return "radix";
    case FindingKind::kPlaneCrossing: return "plane_crossing";
    case FindingKind::kDisconnected: return "disconnected";
  }
  return "?";
}

TopologySpec TopologySpec::hxmesh(HxMeshParams p, std::string name) {
  if (name.empty()) {
    name = "hx" + std::to_string(p.a) + "mesh:" + std::to_string(p.x) + "x" +
           std::to_string(p.y);
  }
  return {Family::kHxMesh, std::move(name), p};
}

TopologySpec TopologySpec::hyperx(int x, int y, int planes, int radix) {
  HxMeshParams p;
  p.a = p.b = 1;
  p.x = x;
  p.y = y;
  p.planes = planes;
  p.radix = radix;
  return {Family::kHyperX,
          "hyperx:" + std::to_string(x) + "x" + std::to_string(y), p};
}

TopologySpec TopologySpec::fat_tree(FatTreeParams p, std::string name) {
  if (name.empty()) name = "fat_tree:" + std::to_string(p.endpoints);
  return {Family::kFatTree, std::move(name), p};
}

TopologySpec TopologySpec::dragonfly(DragonflyParams p, std::string name) {
  if (name.empty()) name = "dragonfly:" + std::to_string(p.groups) + "g";
  return {Family::kDragonfly, std::move(name), p};
}

TopologySpec TopologySpec::torus(TorusParams p, std::string name) {
  if (name.empty()) {
    name = "torus:" + std::to_string(p.x) + "x" + std::to_string(p.y);
  }
  return {Family::kTorus2d, std::move(name), p};
}

FatTreeParams fat_tree_from_taper(int endpoints, double taper, int planes,
                                  int radix) {
  require(taper > 0.0 && taper <= 1.0, "fat tree taper must be in (0, 1]");
  FatTreeParams p;
  p.endpoints = endpoints;
  p.down_per_leaf = static_cast<int>(std::floor(radix / (1.0 + taper) + 1e-9));
  p.up_per_leaf = radix - p.down_per_leaf;
  p.planes = planes;
  p.radix = radix;
  return p;
}

// ---------------------------------------------------------------------------

Topology::Topology(TopologySpec spec, Layout layout, std::vector<Node> nodes,
                   std::vector<Link> links)
    : spec_(std::move(spec)),
      layout_(layout),
      nodes_(std::move(nodes)),
      links_(std::move(links)) {
  while (accelerators_ < static_cast<int>(nodes_.size()) &&
         nodes_[accelerators_].kind == NodeKind::kAccelerator) {
    ++accelerators_;
  }
  const auto n = nodes_.size();
  offsets_.assign(layout_.planes, std::vector<std::int32_t>(n + 1, 0));
  adjacency_.assign(layout_.planes, {});
  for (const Link& k : links_) {
    if (k.plane < 0 || k.plane >= layout_.planes) {
      fail(ErrorCode::kInvalidArgument, "link plane out of range");
    }
    if (k.u < 0 || k.v < 0 || static_cast<std::size_t>(k.u) >= n ||
        static_cast<std::size_t>(k.v) >= n) {
      fail(ErrorCode::kInvalidArgument, "link endpoint out of range");
    }
    ++offsets_[k.plane][k.u + 1];
    ++offsets_[k.plane][k.v + 1];
  }
  for (int p = 0; p < layout_.planes; ++p) {
    auto& off = offsets_[p];
    std::partial_sum(off.begin(), off.end(), off.begin());
    adjacency_[p].resize(static_cast<std::size_t>(off.back()));
  }
  std::vector<std::vector<std::int32_t>> fill = offsets_;
  for (LinkId l = 0; l < static_cast<LinkId>(links_.size()); ++l) {
    const Link& k = links_[l];
    auto& adj = adjacency_[k.plane];
    adj[fill[k.plane][k.u]++] = {l, k.v};
    adj[fill[k.plane][k.v]++] = {l, k.u};
  }
}

NodeId Topology::accelerator_at(int gx, int gy) const {
  if (layout_.grid_width <= 0) {
    require(gy == 0 && gx >= 0 && gx < accelerators_,
            "accelerator index out of range");
    return gx;
  }
  require(gx >= 0 && gx < layout_.grid_width && gy >= 0 &&
              gy < layout_.grid_height,
          "accelerator coordinate out of range");
  return gy * layout_.grid_width + gx;
}

BoardCoord Topology::board_of(NodeId acc) const {
  const Node& n = node(acc);
  if (layout_.grid_width <= 0) return {0, n.gx};
  return {n.gy / layout_.board_b, n.gx / layout_.board_a};
}

int Topology::board_rows() const {
  return layout_.grid_width > 0 ? layout_.grid_height / layout_.board_b : 1;
}

int Topology::board_cols() const {
  return layout_.grid_width > 0 ? layout_.grid_width / layout_.board_a
                                : accelerators_;
}

std::span<const Adjacent> Topology::neighbors(NodeId n, int plane) const {
  const auto& off = offsets_[plane];
  const auto* base = adjacency_[plane].data();
  return {base + off[n], base + off[n + 1]};
}

LinkId Topology::port_link(NodeId acc, int plane, Port p) const {
  for (const Adjacent& a : neighbors(acc, plane)) {
    if (port_at(a.link, acc) == p) return a.link;
  }
  return -1;
}

// ---------------------------------------------------------------------------

namespace {

int ceil_div(long long a, long long b) { return static_cast<int>((a + b - 1) / b); }

class Builder {
 public:
  NodeId add_accelerator(int gx, int gy) {
    Node n;
    n.kind = NodeKind::kAccelerator;
    n.gx = gx;
    n.gy = gy;
    nodes.push_back(n);
    return static_cast<NodeId>(nodes.size() - 1);
  }

  NodeId add_switch(int plane, int level, int physical, int group = -1,
                    Dim dim = Dim::kNone) {
    Node n;
    n.kind = NodeKind::kSwitch;
    n.plane = static_cast<std::int16_t>(plane);
    n.level = static_cast<std::int8_t>(level);
    n.physical = physical < 0 ? next_physical++ : physical;
    n.group = group;
    n.dim = dim;
    nodes.push_back(n);
    return static_cast<NodeId>(nodes.size() - 1);
  }

  int new_physical() { return next_physical++; }

  void connect(NodeId u, NodeId v, int plane, Medium m, Port pu = Port::kNone,
               Port pv = Port::kNone) {
    Link k;
    k.u = u;
    k.v = v;
    k.plane = static_cast<std::int16_t>(plane);
    k.medium = m;
    k.u_port = pu;
    k.v_port = pv;
    links.push_back(k);
  }

  std::vector<Node> nodes;
  std::vector<Link> links;
  int next_physical = 0;
};

struct Endpoint {
  NodeId node;
  Port port;
};

// Connects the outer ports of one accelerator line across all boards.
class LineConnector {
 public:
  LineConnector(Builder& b, const HxMeshParams& p, int plane)
      : b_(b), p_(p), plane_(plane) {}

  void connect(const std::vector<Endpoint>& ends, Dim dim, int line,
               int& packing_slot, int& packing_physical) {
    const int q = static_cast<int>(ends.size());
    const int k = p_.radix;
    const Medium edge = dim == Dim::kRow ? Medium::kDac : Medium::kAoc;
    if (q == 2) {
      // Single board along this dimension: wrap cable, no switch.
      if (ends[0].node != ends[1].node) {
        b_.connect(ends[1].node, ends[0].node, plane_, edge, ends[1].port,
                   ends[0].port);
      }
      return;
    }
    const bool fits = q <= k;
    bool tree = false;
    switch (p_.global_kind) {
      case GlobalKind::kAuto: tree = !fits; break;
      case GlobalKind::kSingleSwitch:
        if (!fits) {
          fail(ErrorCode::kRadixOverflow,
               "line connector needs " + std::to_string(q) +
                   " ports but switch radix is " + std::to_string(k));
        }
        break;
      case GlobalKind::kFatTree: tree = true; break;
    }
    if (!tree) {
      const int per_physical = std::max(1, k / q);
      if (packing_slot % per_physical == 0) packing_physical = b_.new_physical();
      ++packing_slot;
      const NodeId sw = b_.add_switch(plane_, 1, packing_physical, line, dim);
      for (const Endpoint& e : ends) b_.connect(e.node, sw, plane_, edge, e.port);
      return;
    }
    const int half = k / 2;
    const int leaves = ceil_div(q, half);
    const int up = std::max(1, static_cast<int>(std::lround(half * p_.taper)));
    const int tops = ceil_div(static_cast<long long>(leaves) * up, k);
    if (tops > up || leaves > k) {
      fail(ErrorCode::kRadixOverflow,
           "line connector with " + std::to_string(q) +
               " ports needs more than two switch levels at radix " +
               std::to_string(k));
    }
    std::vector<NodeId> l1(leaves), l2(tops);
    for (auto& s : l1) s = b_.add_switch(plane_, 1, -1, line, dim);
    for (auto& s : l2) s = b_.add_switch(plane_, 2, -1, line, dim);
    for (int e = 0; e < q; ++e) {
      b_.connect(ends[e].node, l1[e / half], plane_, edge, ends[e].port);
    }
    for (int l = 0; l < leaves; ++l) {
      for (int j = 0; j < up; ++j) {
        b_.connect(l1[l], l2[(l * up + j) % tops], plane_, Medium::kAoc);
      }
    }
  }

 private:
  Builder& b_;
  const HxMeshParams& p_;
  int plane_;
};

Topology build_hxmesh(const TopologySpec& spec, const HxMeshParams& p) {
  require(p.a >= 1 && p.b >= 1 && p.x >= 1 && p.y >= 1,
          "board and grid dimensions must be positive");
  require(p.planes >= 1, "plane count must be positive");
  require(p.taper > 0.0 && p.taper <= 1.0, "taper must be in (0, 1]");
  require(p.radix >= 4 && p.radix % 2 == 0, "radix must be even and >= 4");
  const int width = p.a * p.x;
  const int height = p.b * p.y;
  require(static_cast<long long>(width) * height <= (1LL << 26),
          "HxMesh too large");
  Builder b;
  for (int gy = 0; gy < height; ++gy) {
    for (int gx = 0; gx < width; ++gx) b.add_accelerator(gx, gy);
  }
  auto acc = [&](int gx, int gy) { return gy * width + gx; };

  for (int plane = 0; plane < p.planes; ++plane) {
    for (int gy = 0; gy < height; ++gy) {
      for (int gx = 0; gx < width; ++gx) {
        if (gx % p.a != p.a - 1) {
          b.connect(acc(gx, gy), acc(gx + 1, gy), plane, Medium::kPcb,
                    Port::kEast, Port::kWest);
        }
        if (gy % p.b != p.b - 1) {
          b.connect(acc(gx, gy), acc(gx, gy + 1), plane, Medium::kPcb,
                    Port::kNorth, Port::kSouth);
        }
      }
    }
    LineConnector lc(b, p, plane);
    int line = 0;
    for (int by = 0; by < p.y; ++by) {
      int slot = 0, physical = -1;
      for (int r = 0; r < p.b; ++r) {
        std::vector<Endpoint> ends;
        const int gy = by * p.b + r;
        for (int bx = 0; bx < p.x; ++bx) {
          ends.push_back({acc(bx * p.a, gy), Port::kWest});
          ends.push_back({acc(bx * p.a + p.a - 1, gy), Port::kEast});
        }
        lc.connect(ends, Dim::kRow, line++, slot, physical);
      }
    }
    for (int bx = 0; bx < p.x; ++bx) {
      int slot = 0, physical = -1;
      for (int c = 0; c < p.a; ++c) {
        std::vector<Endpoint> ends;
        const int gx = bx * p.a + c;
        for (int by = 0; by < p.y; ++by) {
          ends.push_back({acc(gx, by * p.b), Port::kSouth});
          ends.push_back({acc(gx, by * p.b + p.b - 1), Port::kNorth});
        }
        lc.connect(ends, Dim::kColumn, line++, slot, physical);
      }
    }
  }
  Topology::Layout layout{p.planes, p.radix, p.a, p.b, width, height};
  return Topology(spec, layout, std::move(b.nodes), std::move(b.links));
}

Topology build_fat_tree(const TopologySpec& spec, const FatTreeParams& p) {
  const int k = p.radix;
  require(p.endpoints >= 1 && p.planes >= 1, "fat tree needs endpoints and planes");
  require(p.down_per_leaf >= 1 && p.up_per_leaf >= 1 &&
              p.down_per_leaf + p.up_per_leaf <= k,
          "leaf port split exceeds radix");
  const int leaves = ceil_div(p.endpoints, p.down_per_leaf);
  const long long uplinks = static_cast<long long>(leaves) * p.up_per_leaf;
  const int tops2 = ceil_div(uplinks, k);
  const bool two_level = tops2 <= p.up_per_leaf;
  Builder b;
  for (int e = 0; e < p.endpoints; ++e) b.add_accelerator(e, 0);

  for (int plane = 0; plane < p.planes; ++plane) {
    std::vector<NodeId> leaf(leaves);
    for (int l = 0; l < leaves; ++l) leaf[l] = b.add_switch(plane, 1, -1, l);
    for (int e = 0; e < p.endpoints; ++e) {
      b.connect(e, leaf[e / p.down_per_leaf], plane, Medium::kDac);
    }
    if (two_level) {
      std::vector<NodeId> top(tops2);
      for (auto& s : top) s = b.add_switch(plane, 2, -1);
      for (long long h = 0; h < uplinks; ++h) {
        b.connect(leaf[h / p.up_per_leaf], top[h % tops2], plane, Medium::kAoc);
      }
      continue;
    }
    const int mid_count = ceil_div(uplinks, k / 2);
    const int top_count = ceil_div(uplinks, k);
    std::vector<NodeId> mid(mid_count), top(top_count);
    for (auto& s : mid) s = b.add_switch(plane, 2, -1);
    for (auto& s : top) s = b.add_switch(plane, 3, -1);
    std::vector<int> mid_down(mid_count, 0);
    for (long long h = 0; h < uplinks; ++h) {
      const int m = static_cast<int>(h % mid_count);
      b.connect(leaf[h / p.up_per_leaf], mid[m], plane, Medium::kAoc);
      ++mid_down[m];
    }
    long long g = 0;
    for (int m = 0; m < mid_count; ++m) {
      for (int j = 0; j < mid_down[m]; ++j, ++g) {
        b.connect(mid[m], top[g % top_count], plane, Medium::kAoc);
      }
    }
  }
  Topology::Layout layout{p.planes, k, 1, 1, 0, 0};
  return Topology(spec, layout, std::move(b.nodes), std::move(b.links));
}

Topology build_dragonfly(const TopologySpec& spec, const DragonflyParams& p) {
  require(p.groups >= 2 && p.routers_per_group >= 1 &&
              p.terminals_per_router >= 1 && p.global_per_router >= 1,
          "dragonfly parameters must be positive");
  require(p.routers_per_switch >= 1 &&
              p.routers_per_group % p.routers_per_switch == 0,
          "routers per group must be a multiple of routers per switch");
  const int rps = p.routers_per_switch;
  const int switches = p.routers_per_group / rps;
  const int terminals = p.terminals_per_router * rps;
  const int globals = p.global_per_router * rps;
  const int locals = (switches - 1) * rps * rps;
  if (terminals + globals + locals > p.radix) {
    fail(ErrorCode::kRadixOverflow, "dragonfly switch exceeds radix");
  }
  const int groups = p.groups;
  const int group_ports = p.routers_per_group * p.global_per_router;

  // Global links per group offset, symmetric so that offsets o and G-o match.
  std::vector<int> per_offset(groups, 0);
  const int base = group_ports / (groups - 1);
  int extra = group_ports - base * (groups - 1);
  for (int o = 1; o < groups; ++o) per_offset[o] = base;
  if (groups % 2 == 0 && extra % 2 == 1) {
    ++per_offset[groups / 2];
    --extra;
  }
  for (int o = 1; extra >= 2 && o < groups - o; ++o) {
    ++per_offset[o];
    ++per_offset[groups - o];
    extra -= 2;
  }
  // Round-robin interleaving of target groups over a group's global ports.
  std::vector<std::vector<int>> targets(groups);
  for (int g = 0; g < groups; ++g) {
    std::vector<int> left = per_offset;
    bool any = true;
    while (any) {
      any = false;
      for (int o = 1; o < groups; ++o) {
        if (left[o] > 0) {
          --left[o];
          targets[g].push_back((g + o) % groups);
          any = true;
        }
      }
    }
  }
  const int endpoints = groups * p.routers_per_group * p.terminals_per_router;
  Builder b;
  for (int e = 0; e < endpoints; ++e) b.add_accelerator(e, 0);
  for (int plane = 0; plane < p.planes; ++plane) {
    std::vector<NodeId> sw(static_cast<std::size_t>(groups) * switches);
    for (int g = 0; g < groups; ++g) {
      for (int s = 0; s < switches; ++s) {
        sw[g * switches + s] = b.add_switch(plane, 1, -1, g);
      }
    }
    for (int e = 0; e < endpoints; ++e) {
      b.connect(e, sw[e / terminals], plane, Medium::kDac);
    }
    for (int g = 0; g < groups; ++g) {
      for (int s = 0; s < switches; ++s) {
        for (int t = s + 1; t < switches; ++t) {
          for (int r = 0; r < rps * rps; ++r) {
            b.connect(sw[g * switches + s], sw[g * switches + t], plane,
                      Medium::kDac);
          }
        }
      }
    }
    // Match the k-th port of g aimed at h with the k-th port of h aimed at g.
    std::map<std::pair<int, int>, std::vector<int>> ports;
    for (int g = 0; g < groups; ++g) {
      for (int q = 0; q < static_cast<int>(targets[g].size()); ++q) {
        ports[{g, targets[g][q]}].push_back(q);
      }
    }
    for (const auto& [key, list] : ports) {
      const auto [g, h] = key;
      if (g >= h) continue;
      const auto& back = ports[{h, g}];
      if (back.size() != list.size()) {
        fail(ErrorCode::kConstraintViolation, "asymmetric dragonfly wiring");
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        b.connect(sw[g * switches + list[i] / globals],
                  sw[h * switches + back[i] / globals], plane, Medium::kAoc);
      }
    }
  }
  Topology::Layout layout{p.planes, p.radix, 1, 1, 0, 0};
  return Topology(spec, layout, std::move(b.nodes), std::move(b.links));
}

Topology build_torus(const TopologySpec& spec, const TorusParams& p) {
  require(p.x >= 1 && p.y >= 1 && p.planes >= 1, "torus dimensions must be positive");
  require(p.board_a >= 1 && p.board_b >= 1 && p.x % p.board_a == 0 &&
              p.y % p.board_b == 0,
          "torus dimensions must be multiples of the board size");
  Builder b;
  for (int gy = 0; gy < p.y; ++gy) {
    for (int gx = 0; gx < p.x; ++gx) b.add_accelerator(gx, gy);
  }
  auto acc = [&](int gx, int gy) { return gy * p.x + gx; };
  for (int plane = 0; plane < p.planes; ++plane) {
    for (int gy = 0; gy < p.y; ++gy) {
      for (int gx = 0; gx < p.x; ++gx) {
        if (p.x > 1) {
          const int nx = (gx + 1) % p.x;
          const bool pcb = nx != 0 && gx / p.board_a == nx / p.board_a;
          b.connect(acc(gx, gy), acc(nx, gy), plane,
                    pcb ? Medium::kPcb : p.board_link_medium, Port::kEast,
                    Port::kWest);
        }
        if (p.y > 1) {
          const int ny = (gy + 1) % p.y;
          const bool pcb = ny != 0 && gy / p.board_b == ny / p.board_b;
          b.connect(acc(gx, gy), acc(gx, ny), plane,
                    pcb ? Medium::kPcb : p.board_link_medium, Port::kNorth,
                    Port::kSouth);
        }
      }
    }
  }
  Topology::Layout layout{p.planes, 0, p.board_a, p.board_b, p.x, p.y};
  return Topology(spec, layout, std::move(b.nodes), std::move(b.links));
}

}  // namespace

Topology build_topology(const TopologySpec& spec) {
  return std::visit(
      [&](const auto& p) -> Topology {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HxMeshParams>) {
          return build_hxmesh(spec, p);
        } else if constexpr (std::is_same_v<P, FatTreeParams>) {
          return build_fat_tree(spec, p);
        } else if constexpr (std::is_same_v<P, DragonflyParams>) {
          return build_dragonfly(spec, p);
        } else {
          return build_torus(spec, p);
        }
      },
      spec.params);
}

// ---------------------------------------------------------------------------

ValidationReport validate_topology(const Topology& t) {
  ValidationReport report;
  auto add = [&](FindingKind k, std::string msg) {
    report.findings.push_back({k, std::move(msg)});
  };
  for (LinkId l = 0; l < static_cast<LinkId>(t.link_count()); ++l) {
    const Link& k = t.link(l);
    for (NodeId n : {k.u, k.v}) {
      const Node& nd = t.node(n);
      if (nd.kind == NodeKind::kSwitch && nd.plane != k.plane) {
        add(FindingKind::kPlaneCrossing,
            "link " + std::to_string(l) + " in plane " + std::to_string(k.plane) +
                " touches switch " + std::to_string(n) + " of plane " +
                std::to_string(nd.plane));
      }
    }
  }
  for (NodeId a = 0; a < t.accelerator_count(); ++a) {
    for (int plane = 0; plane < t.planes(); ++plane) {
      auto adj = t.neighbors(a, plane);
      int per_port[5] = {0, 0, 0, 0, 0};
      for (const Adjacent& x : adj) {
        ++per_port[static_cast<int>(t.port_at(x.link, a))];
      }
      bool over = adj.size() > 4;
      for (int q = 0; q < 4; ++q) over = over || per_port[q] > 1;
      if (over) {
        add(FindingKind::kPortBudget,
            "accelerator " + std::to_string(a) + " uses " +
                std::to_string(adj.size()) + " links in plane " +
                std::to_string(plane));
      }
    }
  }
  if (t.radix() > 0) {
    std::map<int, int> degree;
    for (const Link& k : t.links()) {
      for (NodeId n : {k.u, k.v}) {
        if (!t.is_accelerator(n)) ++degree[t.node(n).physical];
      }
    }
    for (const auto& [phys, deg] : degree) {
      if (deg > t.radix()) {
        add(FindingKind::kRadix, "physical switch " + std::to_string(phys) +
                                     " uses " + std::to_string(deg) + " of " +
                                     std::to_string(t.radix()) + " ports");
      }
    }
  }
  if (t.accelerator_count() > 0) {
    for (int plane = 0; plane < t.planes(); ++plane) {
      auto d = bfs_distances(t, 0, plane);
      int missing = 0;
      for (NodeId a = 0; a < t.accelerator_count(); ++a) missing += d[a] < 0;
      if (missing > 0) {
        add(FindingKind::kDisconnected,
            "plane " + std::to_string(plane) + ": " + std::to_string(missing) +
                " accelerators unreachable");
      }
    }
  }
  return report;
}

std::vector<int> bfs_distances(const Topology& t, NodeId src, int plane) {
  require(plane >= 0 && plane < t.planes(), "plane out of range");
  require(src >= 0 && static_cast<std::size_t>(src) < t.node_count(),
          "node out of range");
  std::vector<int> dist(t.node_count(), -1);
  std::vector<NodeId> queue;
  queue.reserve(t.node_count());
  dist[src] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (const Adjacent& a : t.neighbors(u, plane)) {
      if (dist[a.neighbor] < 0) {
        dist[a.neighbor] = dist[u] + 1;
        queue.push_back(a.neighbor);
      }
    }
  }
  return dist;
}

int hop_distance(const Topology& t, NodeId src, NodeId dst, int plane) {
  require(dst >= 0 && static_cast<std::size_t>(dst) < t.node_count(),
          "node out of range");
  const int d = bfs_distances(t, src, plane)[dst];
  if (d < 0) {
    fail(ErrorCode::kUnreachable, "node " + std::to_string(dst) +
                                      " unreachable from " + std::to_string(src));
  }
  return d;
}

}  // namespace hxmesh
