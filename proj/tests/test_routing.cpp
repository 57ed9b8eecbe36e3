#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "hxmesh/routing.hpp"

using namespace hxmesh;

namespace {

Topology hx(int a, int x, int y, int radix = 64) {
  HxMeshParams p;
  p.a = p.b = a;
  p.x = x;
  p.y = y;
  p.planes = 1;
  p.radix = radix;
  return build_topology(TopologySpec::hxmesh(p));
}

// Independent oracle: every shortest path by plain DFS, then filtered by the
// board rules applied to the finished hop sequence.
std::size_t oracle_count(const Topology& t, NodeId src, NodeId dst) {
  const auto dist = bfs_distances(t, dst, 0);
  std::size_t count = 0;
  std::vector<LinkId> links;
  std::function<void(NodeId)> walk = [&](NodeId u) {
    if (u == dst) {
      bool north = false;
      int leaves = 0;
      NodeId at = src;
      bool ok = true;
      for (LinkId l : links) {
        const NodeId next = t.other_end(l, at);
        const Link& k = t.link(l);
        if (t.is_accelerator(at) && t.is_accelerator(next) && k.medium == Medium::kPcb) {
          const Port p = t.port_at(l, at);
          if (north && p != Port::kNorth) ok = false;
          if (p == Port::kNorth) north = true;
        } else if (t.is_accelerator(at)) {
          ++leaves;
          north = false;
        }
        at = next;
      }
      if (ok && leaves <= 2) ++count;
      return;
    }
    for (const Adjacent& a : t.neighbors(u, 0)) {
      if (dist[a.neighbor] == dist[u] - 1) {
        links.push_back(a.link);
        walk(a.neighbor);
        links.pop_back();
      }
    }
  };
  walk(src);
  return count;
}

std::set<BoardCoord, bool (*)(const BoardCoord&, const BoardCoord&)> boards_on(
    const Topology& t, const Path& p) {
  std::set<BoardCoord, bool (*)(const BoardCoord&, const BoardCoord&)> s(
      [](const BoardCoord& a, const BoardCoord& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
  for (const Hop& h : p.hops) {
    const NodeId n = channel_target(t, h.channel);
    if (t.is_accelerator(n)) s.insert(t.board_of(n));
  }
  return s;
}

}  // namespace

TEST_CASE("on-board neighbours have one single-hop path") {
  const Topology t = hx(2, 4, 4);
  Router r(t);
  const auto paths = r.candidate_paths(t.accelerator_at(0, 0), t.accelerator_at(1, 0));
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].size() == 1);
  CHECK(paths[0].hops[0].vc == 0);
}

TEST_CASE("every candidate path is minimal and matches the oracle count") {
  for (int a : {1, 2, 4}) {
    const Topology t = hx(a, 4, 3);
    Router r(t);
    std::mt19937 rng(7);
    std::uniform_int_distribution<NodeId> pick(0, t.accelerator_count() - 1);
    for (int trial = 0; trial < 60; ++trial) {
      const NodeId s = pick(rng), d = pick(rng);
      if (s == d) continue;
      CAPTURE(a);
      CAPTURE(s);
      CAPTURE(d);
      const int hops = hop_distance(t, s, d);
      const auto paths = r.candidate_paths(s, d);
      CHECK(paths.size() == oracle_count(t, s, d));
      CHECK(r.path_count(s, d) == doctest::Approx(static_cast<double>(paths.size())));
      for (const auto& p : paths) {
        CHECK(static_cast<int>(p.size()) == hops);
        CHECK(channel_source(t, p.hops.front().channel) == s);
        CHECK(channel_target(t, p.hops.back().channel) == d);
        for (std::size_t i = 1; i < p.size(); ++i) {
          CHECK(channel_source(t, p.hops[i].channel) ==
                channel_target(t, p.hops[i - 1].channel));
        }
      }
      double sum = 0.0;
      for (const auto& w : r.channel_weights(s, d)) sum += w.weight;
      CHECK(sum == doctest::Approx(hops));
    }
  }
}

TEST_CASE("same-row corner-to-corner paths match the BFS distance") {
  const Topology t = hx(2, 4, 4);
  Router r(t);
  const NodeId s = t.accelerator_at(0, 0), d = t.accelerator_at(7, 1);
  const auto paths = r.candidate_paths(s, d);
  REQUIRE_FALSE(paths.empty());
  std::set<int> vcs;
  for (const auto& p : paths) {
    CHECK(static_cast<int>(p.size()) == hop_distance(t, s, d));
    const auto vp = assign_virtual_channels(t, p);
    for (const Hop& h : vp.hops) vcs.insert(h.vc);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.hops[i].vc == vp.hops[i].vc);
  }
  CHECK(vcs == std::set<int>{0, 1});
}

TEST_CASE("cross row and column paths use one intermediate board") {
  const Topology t = hx(2, 4, 4);
  Router r(t);
  const NodeId s = t.accelerator_at(1, 1), d = t.accelerator_at(4, 6);
  const BoardCoord sb = t.board_of(s), db = t.board_of(d);
  const auto paths = r.candidate_paths(s, d);
  REQUIRE_FALSE(paths.empty());
  bool row_first = false, col_first = false;
  for (const auto& p : paths) {
    auto boards = boards_on(t, p);
    boards.erase(sb);
    boards.erase(db);
    REQUIRE(boards.size() == 1);
    const BoardCoord mid = *boards.begin();
    const bool rf = mid.row == sb.row && mid.col == db.col;
    const bool cf = mid.row == db.row && mid.col == sb.col;
    CHECK((rf || cf));
    row_first |= rf;
    col_first |= cf;
    int max_vc = 0;
    for (const Hop& h : p.hops) max_vc = std::max(max_vc, h.vc);
    CHECK(max_vc == 2);
  }
  CHECK(row_first);
  CHECK(col_first);
}

TEST_CASE("intermediate-board path uses all three VCs") {
  const Topology t = hx(4, 3, 3);
  Router r(t);
  const auto paths = r.candidate_paths(t.accelerator_at(1, 1), t.accelerator_at(9, 9));
  std::set<int> vcs;
  for (const auto& p : paths) {
    for (const Hop& h : p.hops) vcs.insert(h.vc);
  }
  CHECK(vcs == std::set<int>{0, 1, 2});
}

TEST_CASE("virtual channel assignment rejects a third tree crossing") {
  const Topology t = hx(1, 3, 3);
  // Walk E-switch-W three times along row 0.
  Path p;
  NodeId at = t.accelerator_at(0, 0);
  for (int i = 0; i < 3; ++i) {
    const LinkId out = t.port_link(at, 0, Port::kEast);
    const NodeId sw = t.other_end(out, at);
    p.hops.push_back({channel_of(t, out, at), 0});
    const NodeId next = t.accelerator_at((i + 1) % 3, 0);
    const LinkId in = t.port_link(next, 0, Port::kWest);
    p.hops.push_back({channel_of(t, in, sw), 0});
    at = next;
  }
  CHECK_THROWS_AS(assign_virtual_channels(t, p), Error);
  Path intra;
  const NodeId a = 0;
  intra.hops.push_back({channel_of(t, t.port_link(a, 0, Port::kEast), a), 5});
  CHECK(assign_virtual_channels(t, intra).hops[0].vc == 1);
}

TEST_CASE("restricting transit boards removes paths through foreign boards") {
  const Topology t = hx(2, 3, 3);
  Router r(t);
  const NodeId s = t.accelerator_at(0, 0), d = t.accelerator_at(2, 2);
  std::vector<char> allowed(t.node_count(), 0);
  for (NodeId n = 0; n < t.accelerator_count(); ++n) {
    const BoardCoord b = t.board_of(n);
    allowed[n] = (b.row == 0 && b.col == 0) || (b.row == 1 && b.col == 1) ||
                 (b.row == 0 && b.col == 1);
  }
  const double all = r.path_count(s, d);
  r.set_allowed(allowed);
  const double some = r.path_count(s, d);
  CHECK(some > 0);
  CHECK(some < all);
  for (const auto& p : r.candidate_paths(s, d)) {
    for (const Hop& h : p.hops) {
      const NodeId n = channel_target(t, h.channel);
      if (t.is_accelerator(n)) CHECK(allowed[n]);
    }
  }
}

TEST_CASE("deadlock freedom on HxMesh variants") {
  for (int a : {1, 2, 4}) {
    for (int radix : {64, 4}) {
      if (a == 4 && radix == 4) continue;
      CAPTURE(a);
      CAPTURE(radix);
      const int boards = a == 4 ? 2 : 4;
      const Topology t = hx(a, boards, boards, radix);
      const auto rep = deadlock_check(t, RoutingScheme::kMinimalAdaptive);
      CHECK(rep.acyclic);
      CHECK(rep.max_vc <= 2);
    }
  }
}

TEST_CASE("single board north-last is acyclic") {
  const Topology t = hx(4, 1, 1);
  const auto rep = deadlock_check(t, RoutingScheme::kMinimalAdaptive);
  CHECK(rep.acyclic);
}

TEST_CASE("single-VC dimension order on a torus has a cycle") {
  TorusParams p;
  p.x = p.y = 4;
  p.board_a = p.board_b = 1;
  p.planes = 1;
  const Topology t = build_topology(TopologySpec::torus(p));
  const auto rep = deadlock_check(t, RoutingScheme::kDimensionOrder);
  CHECK_FALSE(rep.acyclic);
  REQUIRE(rep.witness.size() >= 2);
  // Consecutive witness channels must chain head to tail.
  for (std::size_t i = 0; i < rep.witness.size(); ++i) {
    const auto& a = rep.witness[i];
    const auto& b = rep.witness[(i + 1) % rep.witness.size()];
    CHECK(channel_target(t, a.channel) == channel_source(t, b.channel));
  }
}

TEST_CASE("CDG size limit") {
  const Topology t = hx(2, 16, 16);
  CHECK_THROWS_AS(deadlock_check(t, RoutingScheme::kMinimalAdaptive, 1000), Error);
}

TEST_CASE("fat tree paths go through the spine") {
  FatTreeParams p;
  p.endpoints = 8;
  p.down_per_leaf = 2;
  p.up_per_leaf = 2;
  p.planes = 1;
  p.radix = 4;
  const Topology t = build_topology(TopologySpec::fat_tree(p));
  Router r(t);
  CHECK(r.candidate_paths(0, 1).size() == 1);
  const auto far = r.candidate_paths(0, 7);
  for (const auto& path : far) CHECK(path.size() == 4);
  CHECK(path_to_json(t, far[0]).size() == 4);
}
