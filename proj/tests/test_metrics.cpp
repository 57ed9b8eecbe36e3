#include <doctest.h>

#include <cmath>

#include "hxmesh/metrics.hpp"

using namespace hxmesh;

namespace {

HxMeshParams hxp(int a, int b, int x, int y, int radix = 64) {
  HxMeshParams p;
  p.a = a;
  p.b = b;
  p.x = x;
  p.y = y;
  p.planes = 1;
  p.radix = radix;
  return p;
}

}  // namespace

TEST_CASE("equipment prices reproduce the published totals") {
  const PriceTable prices;
  // switches * 14280 + aoc * 603 + dac * 272, all planes.
  struct Expect {
    const char* label;
    SizeClass size;
    double usd;
  };
  const Expect expect[] = {
      {"nonblocking_ft", SizeClass::kSmall, 25303040},
      {"taper50_ft", SizeClass::kSmall, 17644320},
      {"taper75_ft", SizeClass::kSmall, 13235376},
      {"dragonfly", SizeClass::kSmall, 27918336},
      {"hyperx", SizeClass::kSmall, 10823680},
      {"hx2mesh", SizeClass::kSmall, 5411840},
      {"hx4mesh", SizeClass::kSmall, 2705920},
      {"torus", SizeClass::kSmall, 2469888},
      {"nonblocking_ft", SizeClass::kLarge, 679903232},
      {"taper50_ft", SizeClass::kLarge, 418258560},
      {"taper75_ft", SizeClass::kLarge, 270822720},
      {"dragonfly", SizeClass::kLarge, 429219840},
      {"hyperx", SizeClass::kLarge, 448233472},
      {"hx2mesh", SizeClass::kLarge, 224116736},
      {"hx4mesh", SizeClass::kLarge, 43294720},
      {"torus", SizeClass::kLarge, 39518208},
  };
  for (const auto& e : expect) {
    CAPTURE(e.label);
    const auto r = cost_of(reference_config(e.label, e.size), prices);
    CHECK(r.cost_usd == doctest::Approx(e.usd));
    CHECK(r.relative_error < 0.02);
  }
  const auto torus = cost_of(reference_config("torus", SizeClass::kSmall), prices);
  CHECK(torus.alt_cost_usd == doctest::Approx(4096.0 * 272));
}

TEST_CASE("price table from json") {
  const auto p = PriceTable::from_json({{"switch", 1.0}, {"dac", 2.0}});
  CHECK(p.switch_usd == 1.0);
  CHECK(p.dac_usd == 2.0);
  CHECK(p.aoc_usd == 603.0);
  EquipmentCount e;
  e.switches = 3;
  e.dac = 4;
  e.aoc = 5;
  CHECK(price(e, p) == doctest::Approx(3 + 8 + 5 * 603.0));
}

TEST_CASE("analytic diameter matches BFS across board shapes") {
  for (int a : {1, 2, 4}) {
    for (int b : {1, 2, 4}) {
      for (int x : {4, 8, 16}) {
        for (int y : {4, 8}) {
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(x);
          CAPTURE(y);
          const auto p = hxp(a, b, x, y);
          const Topology t = build_topology(TopologySpec::hxmesh(p));
          CHECK(bfs_diameter(t) == analytic_diameter(p));
        }
      }
    }
  }
}

TEST_CASE("analytic diameter with tree connectors") {
  for (int radix : {8, 16}) {
    for (int a : {1, 2}) {
      const auto p = hxp(a, a, 16, 8, radix);
      CAPTURE(radix);
      CAPTURE(a);
      const Topology t = build_topology(TopologySpec::hxmesh(p));
      CHECK(bfs_diameter(t) == analytic_diameter(p));
    }
  }
  CHECK(analytic_diameter(hxp(2, 2, 16, 16)) == 4);
  CHECK(analytic_diameter(hxp(4, 4, 8, 8)) == 8);
  CHECK(analytic_diameter(hxp(2, 2, 64, 64)) == 8);
  CHECK(analytic_diameter(hxp(1, 1, 128, 128)) == 8);
  CHECK_THROWS_AS(analytic_diameter(hxp(2, 2, 1, 4)), Error);
}

TEST_CASE("small reference diameters") {
  // The 3-hop Dragonfly entry is checked (and fails) in the acceptance suite.
  const std::pair<const char*, int> expect[] = {
      {"nonblocking_ft", 4}, {"taper50_ft", 4}, {"taper75_ft", 4},
      {"hyperx", 4},         {"hx2mesh", 4},    {"hx4mesh", 8},
      {"torus", 32},
  };
  for (auto [label, d] : expect) {
    CAPTURE(label);
    const Topology t = build_topology(reference_config(label, SizeClass::kSmall).spec);
    CHECK(bfs_diameter(t) == d);
  }
}

TEST_CASE("relative bisection") {
  CHECK(relative_bisection(hxp(2, 2, 16, 16)) == doctest::Approx(0.25));
  CHECK(relative_bisection(hxp(4, 4, 8, 8)) == doctest::Approx(0.125));
  CHECK(relative_bisection(hxp(1, 1, 32, 32)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(relative_bisection(hxp(2, 1, 4, 4)), Error);
  CHECK_THROWS_AS(relative_bisection(hxp(2, 2, 4, 3)), Error);
}

TEST_CASE("min-cut oracle") {
  SUBCASE("ring of four") {
    TorusParams tp;
    tp.x = 4;
    tp.y = 1;
    tp.board_a = tp.board_b = 1;
    tp.planes = 1;
    const Topology t = build_topology(TopologySpec::torus(tp));
    CHECK(mincut_bisection_oracle(t).links == 2);
  }
  SUBCASE("2x2 Hx2Mesh") {
    const auto p = hxp(2, 2, 2, 2);
    const Topology t = build_topology(TopologySpec::hxmesh(p));
    const auto cut = mincut_bisection_oracle(t);
    CHECK(cut.links == p.a * p.x * p.y);
    CHECK(cut.relative == doctest::Approx(relative_bisection(p)));
  }
  SUBCASE("too large") {
    const Topology t = build_topology(TopologySpec::hxmesh(hxp(2, 2, 4, 4)));
    CHECK_THROWS_AS(mincut_bisection_oracle(t), Error);
  }
}
