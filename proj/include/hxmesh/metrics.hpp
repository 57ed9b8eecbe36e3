#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hxmesh/topology.hpp"
#include "hxmesh/topology_io.hpp"

namespace hxmesh {

struct EquipmentCount {
  long long switches = 0;  // physical switches
  long long dac = 0;
  long long aoc = 0;
  long long pcb = 0;
};

EquipmentCount count_equipment(const Topology& t);

struct PriceTable {
  double switch_usd = 14280.0;
  double aoc_usd = 603.0;
  double dac_usd = 272.0;

  static PriceTable from_json(const nlohmann::json& j);
};

double price(const EquipmentCount& e, const PriceTable& prices);

// Worst-case hop count of an HxMesh for boards on different rows and
// columns; requires x, y >= 2.
int analytic_diameter(const HxMeshParams& p);

// Exact worst-case accelerator-to-accelerator hop count in one plane.
int bfs_diameter(const Topology& t, int plane = 0);

// Bisection cut relative to the injection bandwidth of half the machine,
// for square boards, x <= y and even y.
double relative_bisection(const HxMeshParams& p);

struct MinCut {
  long long links = 0;  // per plane
  double relative = 0.0;  // links / injection links of half the accelerators
};

// Exhaustive balanced-bipartition min cut over plane 0, up to 24 accelerators.
MinCut mincut_bisection_oracle(const Topology& t);

struct TableRow {
  std::string label;
  SizeClass size;
  double cost_musd;
  int diameter;
};

// Published reference values (cost in million USD, hop diameter).
const std::vector<TableRow>& published_table();
const TableRow& published_row(const std::string& label, SizeClass size);

struct CostReport {
  std::string label;
  SizeClass size;
  EquipmentCount equipment;
  double cost_usd = 0.0;
  double alt_cost_usd = 0.0;  // torus only: inter-board links priced as DAC
  double published_musd = 0.0;
  double relative_error = 0.0;
};

CostReport cost_of(const ReferenceConfig& cfg, const PriceTable& prices);
std::vector<CostReport> cost_suite(const PriceTable& prices);

}  // namespace hxmesh
