#include <doctest.h>

#include <chrono>
#include <random>
#include <set>

#include "hxmesh/allocation.hpp"

using namespace hxmesh;

namespace {

HxMeshParams grid(int x, int y, int a = 2, int radix = 64) {
  HxMeshParams p;
  p.a = p.b = a;
  p.x = x;
  p.y = y;
  p.planes = 1;
  p.radix = radix;
  return p;
}

// Three failed boards, 0-based (row, column).
ClusterState fig6_state() {
  ClusterState s(grid(4, 4));
  s.mark_failed(0, 2);
  s.mark_failed(2, 1);
  s.mark_failed(3, 2);
  return s;
}

void check_state_consistent(const ClusterState& s) {
  std::set<std::pair<int, int>> used;
  for (const Allocation& a : s.allocations()) {
    CHECK(is_valid_virtual_hxmesh(a.boards()));
    for (const BoardCoord& b : a.boards()) {
      CHECK(used.insert({b.row, b.col}).second);
      CHECK(s.status(b.row, b.col) == BoardStatus::kAllocated);
      CHECK(s.owner(b.row, b.col) == a.job_id);
    }
  }
  CHECK(static_cast<int>(used.size()) == s.allocated_count());
}

}  // namespace

TEST_CASE("virtual sub-HxMesh condition") {
  const std::vector<BoardCoord> yellow = {{0, 0}, {0, 1}, {0, 3}, {1, 0}, {1, 1},
                                          {1, 3}, {3, 0}, {3, 1}, {3, 3}};
  CHECK(is_valid_virtual_hxmesh(yellow));
  CHECK_FALSE(is_valid_virtual_hxmesh({{0, 0}, {0, 1}, {1, 0}, {1, 2}}));
  CHECK_FALSE(is_valid_virtual_hxmesh({}));
  CHECK_FALSE(is_valid_virtual_hxmesh({{0, 0}, {0, 0}}));
  std::vector<BoardCoord> block;
  for (int r = 2; r < 5; ++r) {
    for (int c = 1; c < 7; ++c) block.push_back({r, c});
  }
  CHECK(is_valid_virtual_hxmesh(block));
}

TEST_CASE("failure scenario yields the blue and yellow subnetworks") {
  {
    ClusterState s = fig6_state();
    const auto blue = greedy_allocate(s, {1, 4, 2});
    REQUIRE(blue);
    CHECK(blue->rows == std::vector<int>{0, 1, 2, 3});
    CHECK(blue->cols == std::vector<int>{0, 3});
  }
  {
    ClusterState s = fig6_state();
    const auto yellow = greedy_allocate(s, {2, 3, 3});
    REQUIRE(yellow);
    CHECK(yellow->rows == std::vector<int>{0, 1, 3});
    CHECK(yellow->cols == std::vector<int>{0, 1, 3});
  }
}

TEST_CASE("trivial requests") {
  ClusterState s(grid(4, 4));
  const auto one = greedy_allocate(s, {1, 1, 1});
  REQUIRE(one);
  CHECK(one->rows == std::vector<int>{0});
  CHECK(one->cols == std::vector<int>{0});
  ClusterState e(grid(4, 4));
  CHECK_FALSE(greedy_allocate(e, {2, 5, 1}));
  Heuristics t;
  t.transpose = true;
  CHECK_FALSE(greedy_allocate(e, {2, 5, 1}, t));
  CHECK(e.free_count() == 16);
  CHECK_THROWS_AS(greedy_allocate(e, {3, 0, 1}), Error);
}

TEST_CASE("transpose finds the rotated block") {
  ClusterState s(grid(8, 2));
  CHECK_FALSE(greedy_allocate(s, {1, 4, 1}));
  Heuristics t;
  t.transpose = true;
  const auto a = greedy_allocate(s, {1, 4, 1}, t);
  REQUIRE(a);
  CHECK(a->u() == 1);
  CHECK(a->v() == 4);
}

TEST_CASE("aspect ratio reshapes within the bound") {
  ClusterState s(grid(16, 2));
  Heuristics h;
  h.aspect = true;
  h.transpose = true;
  const auto a = greedy_allocate(s, {1, 4, 4}, h);
  REQUIRE(a);
  CHECK(a->size() == 16);
  CHECK(a->u() <= 2);
  ClusterState narrow(grid(32, 1));
  h.max_aspect = 8;
  CHECK_FALSE(greedy_allocate(narrow, {2, 4, 4}, h));  // 1x16 exceeds the bound
  h.max_aspect = 16;
  CHECK(greedy_allocate(narrow, {2, 4, 4}, h));
}

TEST_CASE("randomized allocations stay valid and transpose never hurts") {
  std::mt19937_64 rng(11);
  int jobs = 0;
  for (int trial = 0; jobs < 10000; ++trial) {
    const int x = 4 + static_cast<int>(rng() % 13), y = 4 + static_cast<int>(rng() % 13);
    ClusterState s = inject_failures(ClusterState(grid(x, y)), static_cast<int>(rng() % (x * y / 4 + 1)), rng());
    for (int k = 0; k < 40; ++k, ++jobs) {
      const JobRequest job{jobs, 1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 6)};
      ClusterState base_copy = s;
      const bool base_ok = greedy_allocate(base_copy, job).has_value();
      Heuristics h;
      h.transpose = true;
      h.aspect = rng() % 2;
      h.locality = rng() % 3 == 0;
      const auto got = greedy_allocate(s, job, h);
      if (base_ok) CHECK(got.has_value());
      if (got) {
        CHECK(got->size() == job.u * job.v);
        for (const BoardCoord& b : got->boards()) CHECK(s.owner(b.row, b.col) == job.id);
      }
    }
    check_state_consistent(s);
  }
}

TEST_CASE("state bookkeeping") {
  ClusterState s(grid(4, 4));
  const auto a = greedy_allocate(s, {7, 2, 2});
  REQUIRE(a);
  CHECK(s.allocated_count() == 4);
  CHECK_THROWS_AS(s.apply(*a), Error);
  s.release(7);
  CHECK(s.free_count() == 16);
  CHECK_THROWS_AS(s.release(7), Error);
  greedy_allocate(s, {8, 1, 1});
  s.mark_failed(0, 0);  // failing an allocated board evicts its job
  CHECK(s.allocations().empty());
  CHECK(s.failed_count() == 1);
}

TEST_CASE("failure injection") {
  const ClusterState s(grid(8, 8));
  CHECK(inject_failures(s, 0, 1).failed_count() == 0);
  const ClusterState a = inject_failures(s, 10, 5), b = inject_failures(s, 10, 5);
  CHECK(a.failed_count() == 10);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) CHECK(a.status(r, c) == b.status(r, c));
  }
  ClusterState dead = inject_failures(s, 64, 3);
  CHECK_FALSE(greedy_allocate(dead, {1, 1, 1}));
  CHECK_THROWS_AS(inject_failures(s, 65, 1), Error);
}

TEST_CASE("job mix sampling") {
  const SizeDistribution point{{{1, 1.0}}};
  const JobTrace t = sample_job_mix(point, 16, 3);
  CHECK(t.sizes == std::vector<int>(16, 1));
  const SizeDistribution mixed = synthetic_distribution(64);
  JobMixSampler s(mixed, 9);
  for (int i = 0; i < 50; ++i) {
    const JobTrace mix = s.next(64);
    CHECK(mix.total() == 64);
  }
  CHECK(sample_job_mix(mixed, 64, 4).sizes == sample_job_mix(mixed, 64, 4).sizes);
  CHECK_THROWS_AS(sample_job_mix(synthetic_distribution(), 16, 1), Error);
  const SizeDistribution bad{{{1, 0.5}}};
  CHECK_THROWS_AS(bad.validate(), Error);
  const SizeDistribution csv = distribution_from_csv("size,probability\n1,0.25\n4,0.75\n");
  CHECK(csv.entries.size() == 2);
  CHECK(csv.max_size() == 4);
  CHECK_THROWS_AS(distribution_from_csv("1;0.5\n"), Error);
}

TEST_CASE("utilization experiment properties") {
  ClusterState s(grid(4, 4));
  const auto full = run_allocation_experiment({JobTrace{std::vector<int>(16, 1)}}, s, {});
  CHECK(full.median == doctest::Approx(1.0));

  const ClusterState small(grid(16, 16));
  const auto traces = sample_job_mixes(synthetic_distribution(256), 256, 200, 1);
  const auto base = run_allocation_experiment(traces, small, {});
  const auto tuned = run_allocation_experiment(traces, small, heuristics_from_string("transpose,sort"));
  CHECK(tuned.median >= base.median);
  CHECK(base.median >= 0.85);

  const ClusterState hx4(grid(8, 8, 4));
  const ClusterState broken = inject_failures(hx4, 40, 2);
  const auto f = run_allocation_experiment(sample_job_mixes(synthetic_distribution(24), 24, 50, 3),
                                           broken, heuristics_from_string("transpose,sort"));
  CHECK(f.median > 0.0);
  CHECK(f.median <= 1.0);
}

TEST_CASE("heuristic parsing") {
  const Heuristics h = heuristics_from_string("transpose,sort");
  CHECK(h.transpose);
  CHECK(h.sort);
  CHECK_FALSE(h.aspect);
  CHECK(to_string(h) == "transpose,sort");
  CHECK(to_string(Heuristics{}) == "base");
  CHECK_THROWS_AS(heuristics_from_string("magic"), Error);
}

TEST_CASE("upper-level traffic") {
  SUBCASE("single switch per line carries nothing upward") {
    Allocation a{1, {0, 1, 2, 3}, {0, 5, 9, 31}};
    CHECK(upper_level_traffic_fraction(grid(32, 32, 4), a, TrafficKind::kAlltoall) == 0.0);
  }
  SUBCASE("row-local job") {
    Allocation a{1, {3}, {0, 1, 2, 3}};
    CHECK(upper_level_traffic_fraction(grid(8, 8, 2, 8), a, TrafficKind::kAlltoall) > 0.0);
    Allocation b{1, {3}, {0, 1}};
    CHECK(upper_level_traffic_fraction(grid(8, 8, 2, 8), b, TrafficKind::kAlltoall) == 0.0);
  }
  SUBCASE("board model matches the router") {
    // Radix 8: two boards per leaf switch, two-level trees on both axes.
    const HxMeshParams g = grid(6, 6, 2, 8);
    const Topology t = build_topology(TopologySpec::hxmesh(g));
    for (const Allocation& a : {Allocation{1, {0, 1}, {0, 1}}, Allocation{1, {0, 3, 4}, {1, 2, 5}},
                                Allocation{1, {2}, {0, 2, 3, 4}}}) {
      for (auto kind : {TrafficKind::kAlltoall, TrafficKind::kAllreduce}) {
        CHECK(upper_level_traffic_fraction(g, a, kind) ==
              doctest::Approx(routed_upper_level_fraction(t, a, kind)));
      }
    }
  }
  SUBCASE("locality lowers the upper-level share") {
    const HxMeshParams g = grid(64, 64, 2);
    ClusterState plain(g), local(g);
    const auto traces = sample_job_mixes(synthetic_distribution(), plain.board_count(), 1, 5);
    Heuristics h = heuristics_from_string("transpose,aspect,sort");
    Heuristics hl = h;
    hl.locality = true;
    run_allocation_experiment(traces, plain, h);
    double sum_plain = 0, sum_local = 0;
    ClusterState sp(g), sl(g);
    int id = 0;
    for (int size : traces[0].sizes) {
      const JobRequest j = square_job(id++, size);
      if (auto a = greedy_allocate(sp, j, h)) sum_plain += upper_level_traffic_fraction(g, *a, TrafficKind::kAlltoall) * size;
      if (auto a = greedy_allocate(sl, j, hl)) sum_local += upper_level_traffic_fraction(g, *a, TrafficKind::kAlltoall) * size;
    }
    CHECK(sum_local <= sum_plain);
  }
}

TEST_CASE("defragmentation estimate") {
  const double gib64 = 64.0 * (1ULL << 30);
  CHECK(defragment_time_estimate(gib64, 800, 1.0) == doctest::Approx(0.0859).epsilon(0.01));
  CHECK(defragment_time_estimate(gib64, 800, 0.1) < 1.0);
  CHECK(defragment_time_estimate(0, 800, 0.1) == 0.0);
  CHECK_THROWS_AS(defragment_time_estimate(1, 0, 0.1), Error);
}

TEST_CASE("jobs never route through foreign boards") {
  const HxMeshParams g = grid(4, 4, 2);
  const Topology t = build_topology(TopologySpec::hxmesh(g));
  ClusterState s(g);
  CHECK(interference_check(t, {*greedy_allocate(s, {1, 2, 2})}));
  std::mt19937_64 rng(1);
  for (int seed = 0; seed < 100; ++seed) {
    ClusterState st = inject_failures(ClusterState(g), static_cast<int>(rng() % 5), seed);
    for (int j = 0; j < 4; ++j) {
      greedy_allocate(st, {j, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3)},
                      heuristics_from_string("transpose"));
    }
    CHECK(interference_check(t, st.allocations()));
  }
  // Diagonal boards share neither a row nor a column line.
  CHECK_FALSE(interference_check(t, std::vector<std::vector<BoardCoord>>{{{0, 0}, {1, 1}}}));
  CHECK(interference_check(t, std::vector<std::vector<BoardCoord>>{{{0, 0}, {0, 3}}}));
}

TEST_CASE("job grid follows the virtual layout") {
  const HxMeshParams g = grid(4, 4, 2);
  const Topology t = build_topology(TopologySpec::hxmesh(g));
  const Allocation a{1, {0, 3}, {1, 3}};
  const JobGrid jg = job_grid(t, a);
  CHECK(jg.rows == 4);
  CHECK(jg.cols == 4);
  CHECK(jg.at(0, 0) == t.accelerator_at(2, 0));
  CHECK(jg.at(0, 2) == t.accelerator_at(6, 0));
  CHECK(jg.at(2, 0) == t.accelerator_at(2, 6));
  const auto e = embed_rings(t, jg);
  CHECK(e.two_rings);
}

TEST_CASE("large machine fills quickly") {
  const HxMeshParams g = grid(1000, 1000, 2);
  const auto traces = sample_job_mixes(synthetic_distribution(), g.x * g.y, 1, 7);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_allocation_experiment(traces, ClusterState(g), heuristics_from_string("transpose,sort"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(r.median > 0.95);
}
