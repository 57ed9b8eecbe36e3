#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hxmesh/routing.hpp"
#include "hxmesh/topology.hpp"

namespace hxmesh {

enum class CollectiveKind { kTree, kRing, kBidirRing, kTwoRings, kTorus2d };
const char* to_string(CollectiveKind k);
CollectiveKind collective_from_string(const std::string& s);

struct CostParams {
  double alpha_s = 1e-6;  // per message
  double beta_s_per_byte = 8.0 / (kLinkGbps * 1e9);  // per interface

  void validate() const;
};

struct CollectiveSpec {
  CollectiveKind kind = CollectiveKind::kTwoRings;
  int p = 1;
  double bytes = 0.0;
};

double collective_time(const CollectiveSpec& spec, const CostParams& cp);
bool is_perfect_square(int p);

// Fastest kind by the analytic model among `candidates` (all kinds when
// empty); ties go to two_rings, torus2d, bidir_ring, ring, tree in that order.
CollectiveKind select_algorithm(int p, double bytes, const CostParams& cp,
                                std::vector<CollectiveKind> candidates = {});

struct TorusDims {
  int rows = 0;
  int cols = 0;
};

struct GridCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

// Horizontal edge joins (row, col) and (row, col+1 mod cols); vertical edge
// joins (row, col) and (row+1 mod rows, col).
struct TorusEdge {
  int row = 0;
  int col = 0;
  bool vertical = false;
  friend bool operator==(const TorusEdge&, const TorusEdge&) = default;
};

struct HamiltonianCycle {
  std::vector<GridCoord> nodes;
  std::vector<TorusEdge> edges;  // edges[i] joins nodes[i] and nodes[i+1]
};

// Throws kNotConstructible naming the violated condition.
void check_constructible(const TorusDims& d);
bool constructible(const TorusDims& d);
std::pair<HamiltonianCycle, HamiltonianCycle> disjoint_hamiltonian_pair(const TorusDims& d);

// Port used to leave nodes[i] toward nodes[i+1].
Port step_port(const HamiltonianCycle& c, std::size_t i);

nlohmann::json cycle_to_json(const HamiltonianCycle& c);

// Accelerators of a job laid out as a row-major virtual grid.
struct JobGrid {
  int rows = 0;
  int cols = 0;
  std::vector<NodeId> nodes;
  NodeId at(int r, int c) const { return nodes[static_cast<std::size_t>(r) * cols + c]; }
};

// All minimal routes that leave src through `exit` and enter dst through the
// opposite port, crossing only switches in between.
std::vector<Path> pinned_routes(const Topology& t, NodeId src, Port exit, NodeId dst,
                                int plane = 0);

struct RingStep {
  int from;  // rank
  int to;
  Port exit = Port::kNone;  // kNone: minimal routing
};

struct RingEmbedding {
  bool two_rings = false;
  TorusDims dims;  // grid the cycles were built on (may be transposed)
  std::vector<std::vector<int>> rings;  // rank order per ring
  std::vector<std::vector<RingStep>> forward;  // per ring, one step per rank
  std::vector<std::vector<RingStep>> backward;
};

// Two edge-disjoint bidirectional rings over the job grid, or a single
// bidirectional ring when the grid is 1-D or not constructible.
RingEmbedding embed_rings(const Topology& t, const JobGrid& job);
// Grid-only variant, for topologies without ports.
RingEmbedding plan_rings(int rows, int cols);

}  // namespace hxmesh
