#include "hxmesh/collectives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace hxmesh {

const char* to_string(CollectiveKind k) {
  switch (k) {
    case CollectiveKind::kTree: return "tree";
    case CollectiveKind::kRing: return "ring";
    case CollectiveKind::kBidirRing: return "bidir_ring";
    case CollectiveKind::kTwoRings: return "two_rings";
    case CollectiveKind::kTorus2d: return "torus2d";
  }
  return "?";
}

CollectiveKind collective_from_string(const std::string& s) {
  for (auto k : {CollectiveKind::kTree, CollectiveKind::kRing, CollectiveKind::kBidirRing,
                 CollectiveKind::kTwoRings, CollectiveKind::kTorus2d}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::kParse, "unknown collective '" + s + "'");
}

void CostParams::validate() const {
  require(alpha_s >= 0.0, "alpha must be non-negative");
  require(beta_s_per_byte > 0.0, "beta must be positive");
}

bool is_perfect_square(int p) {
  if (p < 0) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
  return r * r == p;
}

double collective_time(const CollectiveSpec& spec, const CostParams& cp) {
  cp.validate();
  require(spec.p >= 1, "collective needs at least one participant");
  require(spec.bytes >= 0.0, "message size must be non-negative");
  if (spec.p == 1) return 0.0;
  const double p = spec.p;
  const double a = cp.alpha_s;
  const double sb = spec.bytes * cp.beta_s_per_byte;
  switch (spec.kind) {
    case CollectiveKind::kTree: return std::log2(p) * a + std::log2(p) * sb;
    case CollectiveKind::kRing: return 2 * p * a + 2 * sb;
    case CollectiveKind::kBidirRing: return 2 * p * a + sb;
    case CollectiveKind::kTwoRings: return 2 * p * a + sb / 2;
    case CollectiveKind::kTorus2d: {
      if (!is_perfect_square(spec.p)) {
        fail(ErrorCode::kInvalidArgument, "torus2d needs a square participant count, got " +
                                              std::to_string(spec.p));
      }
      const double q = std::sqrt(p);
      return 4 * q * a + sb * (1 + 2 * q) / (4 * q);
    }
  }
  return 0.0;
}

CollectiveKind select_algorithm(int p, double bytes, const CostParams& cp,
                                std::vector<CollectiveKind> candidates) {
  require(p >= 2, "algorithm selection needs at least two participants");
  static const CollectiveKind order[] = {CollectiveKind::kTwoRings, CollectiveKind::kTorus2d,
                                         CollectiveKind::kBidirRing, CollectiveKind::kRing,
                                         CollectiveKind::kTree};
  if (candidates.empty()) candidates.assign(std::begin(order), std::end(order));
  CollectiveKind best = CollectiveKind::kTree;
  double best_time = INFINITY;
  for (CollectiveKind k : order) {
    if (std::find(candidates.begin(), candidates.end(), k) == candidates.end()) continue;
    if (k == CollectiveKind::kTorus2d && !is_perfect_square(p)) continue;
    const double time = collective_time({k, p, bytes}, cp);
    if (time < best_time) {
      best = k;
      best_time = time;
    }
  }
  require(std::isfinite(best_time), "no applicable allreduce algorithm");
  return best;
}

// ---------------------------------------------------------------------------

void check_constructible(const TorusDims& d) {
  if (d.rows < 2 || d.cols < 2) {
    fail(ErrorCode::kNotConstructible, "two disjoint rings need at least 2x2, got " +
                                           std::to_string(d.rows) + "x" + std::to_string(d.cols));
  }
  if (d.rows % d.cols != 0) {
    fail(ErrorCode::kNotConstructible,
         "condition r = c*k fails: " + std::to_string(d.rows) + " is not a multiple of " +
             std::to_string(d.cols) + "; pad or reshape the job grid");
  }
  if (std::gcd(d.rows, d.cols - 1) != 1) {
    fail(ErrorCode::kNotConstructible,
         "condition gcd(r, c-1) = 1 fails: gcd(" + std::to_string(d.rows) + ", " +
             std::to_string(d.cols - 1) + ") = " + std::to_string(std::gcd(d.rows, d.cols - 1)) +
             "; pad or reshape the job grid");
  }
}

bool constructible(const TorusDims& d) {
  return d.rows >= 2 && d.cols >= 2 && d.rows % d.cols == 0 && std::gcd(d.rows, d.cols - 1) == 1;
}

namespace {

int wrap(int v, int n) { return ((v % n) + n) % n; }

int edge_index(const TorusDims& d, const TorusEdge& e) {
  return (e.row * d.cols + e.col) * 2 + (e.vertical ? 1 : 0);
}

}  // namespace

std::pair<HamiltonianCycle, HamiltonianCycle> disjoint_hamiltonian_pair(const TorusDims& d) {
  check_constructible(d);
  const int r = d.rows, c = d.cols, n = r * c;
  // First ring: identifier X sits at row X / c, column (X - X / c) mod c.
  HamiltonianCycle first;
  std::vector<char> used(static_cast<std::size_t>(n) * 2, 0);
  for (int x = 0; x < n; ++x) {
    const int row = x / c;
    first.nodes.push_back({row, wrap(x - row, c)});
  }
  for (int x = 0; x < n; ++x) {
    const GridCoord a = first.nodes[x];
    const GridCoord b = first.nodes[(x + 1) % n];
    TorusEdge e;
    if (a.row == b.row) {
      e = {a.row, a.col, false};  // b is one step east of a
    } else {
      e = {a.row, a.col, true};  // b is one step north of a, possibly wrapping
    }
    first.edges.push_back(e);
    used[edge_index(d, e)] = 1;
  }
  // Second ring: the complementary 2-factor, walked from (0, 0).
  auto incident = [&](GridCoord v) {
    std::array<TorusEdge, 4> out = {TorusEdge{v.row, v.col, false},
                                    TorusEdge{v.row, wrap(v.col - 1, c), false},
                                    TorusEdge{v.row, v.col, true},
                                    TorusEdge{wrap(v.row - 1, r), v.col, true}};
    return out;
  };
  auto across = [&](const TorusEdge& e, GridCoord from) -> GridCoord {
    if (!e.vertical) {
      return from.col == e.col && from.row == e.row ? GridCoord{e.row, wrap(e.col + 1, c)}
                                                    : GridCoord{e.row, e.col};
    }
    return from.row == e.row && from.col == e.col ? GridCoord{wrap(e.row + 1, r), e.col}
                                                  : GridCoord{e.row, e.col};
  };
  HamiltonianCycle second;
  GridCoord at{0, 0};
  int last = -1;
  for (int step = 0; step < n; ++step) {
    second.nodes.push_back(at);
    bool moved = false;
    for (const TorusEdge& e : incident(at)) {
      const int id = edge_index(d, e);
      if (used[id] || id == last) continue;
      // Edges are tracked by identity: with two columns (or rows) both
      // parallel edges join the same pair of nodes.
      const GridCoord next = across(e, at);
      second.edges.push_back(e);
      used[id] = 2;
      last = id;
      at = next;
      moved = true;
      break;
    }
    if (!moved) break;
  }
  if (second.edges.size() != static_cast<std::size_t>(n) || !(at == GridCoord{0, 0})) {
    fail(ErrorCode::kNotConstructible, "complementary ring is not Hamiltonian for " +
                                           std::to_string(r) + "x" + std::to_string(c));
  }
  return {std::move(first), std::move(second)};
}

Port step_port(const HamiltonianCycle& c, std::size_t i) {
  const TorusEdge& e = c.edges[i];
  const GridCoord& from = c.nodes[i];
  const bool at_origin = from.row == e.row && from.col == e.col;
  if (!e.vertical) return at_origin ? Port::kEast : Port::kWest;
  return at_origin ? Port::kNorth : Port::kSouth;
}

nlohmann::json cycle_to_json(const HamiltonianCycle& c) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& v : c.nodes) nodes.push_back({v.row, v.col});
  return nodes;
}

// ---------------------------------------------------------------------------

std::vector<Path> pinned_routes(const Topology& t, NodeId src, Port exit, NodeId dst,
                                int plane) {
  const LinkId first = t.port_link(src, plane, exit);
  if (first < 0) {
    fail(ErrorCode::kNotConstructible,
         "accelerator " + std::to_string(src) + " has no " + to_string(exit) + " port");
  }
  const NodeId hop = t.other_end(first, src);
  const Port entry = opposite(exit);
  if (hop == dst) {
    if (t.port_at(first, dst) != entry) {
      fail(ErrorCode::kNotConstructible, "ring step enters through the wrong port");
    }
    return {Path{{{channel_of(t, first, src), 0}}}};
  }
  if (t.is_accelerator(hop)) {
    fail(ErrorCode::kNotConstructible, "ring step from " + std::to_string(src) + " via " +
                                           to_string(exit) + " does not reach " +
                                           std::to_string(dst));
  }
  const LinkId last = t.port_link(dst, plane, entry);
  if (last < 0 || t.is_accelerator(t.other_end(last, dst))) {
    fail(ErrorCode::kNotConstructible, "ring step target has no switch on its " +
                                           std::string(to_string(entry)) + " port");
  }
  const NodeId before = t.other_end(last, dst);
  // BFS over switches only, then enumerate descending-distance walks.
  std::vector<int> dist(t.node_count(), -1);
  std::vector<NodeId> queue{before};
  dist[before] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const NodeId u = queue[h];
    for (const Adjacent& a : t.neighbors(u, plane)) {
      if (t.is_accelerator(a.neighbor) || dist[a.neighbor] >= 0) continue;
      dist[a.neighbor] = dist[u] + 1;
      queue.push_back(a.neighbor);
    }
  }
  if (dist[hop] < 0) {
    fail(ErrorCode::kNotConstructible, "ring step crosses disconnected switches");
  }
  std::vector<Path> out;
  Path current{{{channel_of(t, first, src), 0}}};
  auto walk = [&](auto&& self, NodeId u) -> void {
    if (u == before) {
      Path p = current;
      p.hops.push_back({channel_of(t, last, before), 0});
      out.push_back(std::move(p));
      return;
    }
    for (const Adjacent& a : t.neighbors(u, plane)) {
      if (t.is_accelerator(a.neighbor) || dist[a.neighbor] != dist[u] - 1) continue;
      current.hops.push_back({channel_of(t, a.link, u), 0});
      self(self, a.neighbor);
      current.hops.pop_back();
    }
  };
  walk(walk, hop);
  return out;
}

namespace {

// Hamiltonian cycle of an R x C grid graph (R even or C even), else the
// row-major order closed by whatever route the network provides.
std::vector<int> snake_ring(int rows, int cols) {
  std::vector<int> order;
  if (rows == 1 || cols == 1) {
    for (int i = 0; i < rows * cols; ++i) order.push_back(i);
    return order;
  }
  const bool transpose = rows % 2 != 0 && cols % 2 == 0;
  const int r = transpose ? cols : rows;
  const int c = transpose ? rows : cols;
  auto rank = [&](int i, int j) { return transpose ? j * cols + i : i * cols + j; };
  if (r % 2 != 0) {
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) order.push_back(rank(i, i % 2 == 0 ? j : c - 1 - j));
    }
    return order;
  }
  for (int j = 0; j < c; ++j) order.push_back(rank(0, j));
  for (int i = 1; i < r; ++i) {
    for (int k = 0; k < c - 1; ++k) {
      const int j = i % 2 == 1 ? c - 1 - k : 1 + k;
      order.push_back(rank(i, j));
    }
  }
  for (int i = r - 1; i >= 1; --i) order.push_back(rank(i, 0));
  return order;
}

void add_ring(RingEmbedding& e, std::vector<int> order, std::vector<Port> ports) {
  const std::size_t n = order.size();
  std::vector<RingStep> fwd, bwd;
  for (std::size_t i = 0; i < n; ++i) {
    const int from = order[i];
    const int to = order[(i + 1) % n];
    const Port p = ports.empty() ? Port::kNone : ports[i];
    fwd.push_back({from, to, p});
    bwd.push_back({to, from, opposite(p)});
  }
  e.rings.push_back(std::move(order));
  e.forward.push_back(std::move(fwd));
  e.backward.push_back(std::move(bwd));
}

}  // namespace

RingEmbedding plan_rings(int rows, int cols) {
  require(rows >= 1 && cols >= 1, "job grid must be non-empty");
  RingEmbedding e;
  TorusDims d{rows, cols};
  bool transposed = false;
  if (!constructible(d) && constructible({cols, rows})) {
    d = {cols, rows};
    transposed = true;
  }
  if (!constructible(d)) {
    e.dims = {rows, cols};
    add_ring(e, snake_ring(rows, cols), {});
    return e;
  }
  e.two_rings = true;
  e.dims = d;
  auto [a, b] = disjoint_hamiltonian_pair(d);
  for (const HamiltonianCycle* c : {&a, &b}) {
    std::vector<int> order;
    std::vector<Port> ports;
    for (std::size_t i = 0; i < c->nodes.size(); ++i) {
      const GridCoord g = c->nodes[i];
      Port p = step_port(*c, i);
      if (transposed) {
        // Cycle rows run along job columns: swap the axes back.
        order.push_back(g.col * cols + g.row);
        switch (p) {
          case Port::kEast: p = Port::kNorth; break;
          case Port::kWest: p = Port::kSouth; break;
          case Port::kNorth: p = Port::kEast; break;
          case Port::kSouth: p = Port::kWest; break;
          case Port::kNone: break;
        }
      } else {
        order.push_back(g.row * cols + g.col);
      }
      ports.push_back(p);
    }
    add_ring(e, std::move(order), std::move(ports));
  }
  return e;
}

RingEmbedding embed_rings(const Topology& t, const JobGrid& job) {
  require(job.rows * job.cols == static_cast<int>(job.nodes.size()),
          "job grid size does not match its node list");
  RingEmbedding e = plan_rings(job.rows, job.cols);
  if (!e.two_rings || !t.has_ports()) {
    if (!t.has_ports() && e.two_rings) {
      for (auto& ring : e.forward) for (auto& s : ring) s.exit = Port::kNone;
      for (auto& ring : e.backward) for (auto& s : ring) s.exit = Port::kNone;
    }
    return e;
  }
  try {
    for (const auto* dir : {&e.forward, &e.backward}) {
      for (const auto& ring : *dir) {
        for (const RingStep& s : ring) {
          pinned_routes(t, job.nodes[s.from], s.exit, job.nodes[s.to]);
        }
      }
    }
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kNotConstructible) throw;
    RingEmbedding fallback;
    fallback.dims = {job.rows, job.cols};
    add_ring(fallback, snake_ring(job.rows, job.cols), {});
    return fallback;
  }
  return e;
}

}  // namespace hxmesh
