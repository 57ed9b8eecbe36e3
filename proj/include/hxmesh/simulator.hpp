#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hxmesh/collectives.hpp"
#include "hxmesh/routing.hpp"
#include "hxmesh/topology.hpp"

namespace hxmesh {

// Ranks index the endpoint list handed to simulate_flows.
struct Flow {
  int src = 0;
  int dst = 0;
  double bytes = 0.0;
  Port exit = Port::kNone;  // pin the first hop (ring embeddings); kNone routes minimally
};

struct Phase {
  std::vector<Flow> flows;
  int repeat = 1;
  double compute_s = 0.0;  // per-endpoint compute interval
  bool overlap = false;  // compute overlaps communication
  std::string label;
};

struct TrafficPattern {
  std::string kind;
  int participants = 0;
  std::vector<Phase> phases;
};

enum class PatternKind {
  kAlltoall,
  kPermutation,
  kRingAllreduce,
  kBidirRingAllreduce,
  kTwoRingsAllreduce,
  kTorus2dAllreduce,
};
const char* to_string(PatternKind k);
PatternKind pattern_from_string(const std::string& s);

struct PatternParams {
  int p = 0;
  double bytes = 0.0;  // per flow for alltoall/permutation, per rank for allreduce
  std::uint64_t seed = 1;
  // Virtual job grid for ring embeddings; 0 means 1 x p.
  int rows = 0;
  int cols = 0;
};

TrafficPattern make_pattern(PatternKind kind, const PatternParams& params);
void validate_pattern(const TrafficPattern& pattern);
TrafficPattern pattern_from_json(const nlohmann::json& j);
nlohmann::json pattern_to_json(const TrafficPattern& pattern);

enum class SplitMode { kUniform, kBestPath };

struct SimOptions {
  double alpha_s = 0.0;  // latency per round, added to every phase
  SplitMode split = SplitMode::kUniform;
  bool restrict_to_job = true;  // transit only through boards holding endpoints
};

struct PhaseResult {
  std::string label;
  int repeat = 1;
  double comm_s = 0.0;  // one round, including alpha
  double time_s = 0.0;  // one round after compute overlap
  double max_link_load = 0.0;  // highest summed rate / capacity seen
};

struct BandwidthReport {
  std::vector<double> rank_gbps;  // receive bandwidth per endpoint
  std::vector<PhaseResult> phases;
  double total_s = 0.0;
  double injection_gbps = 0.0;  // per endpoint, all planes
  double bytes_per_rank = 0.0;  // mean bytes received
  double share_of_injection = 0.0;
  double max_link_load = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

BandwidthReport simulate_flows(const Topology& t, const std::vector<NodeId>& endpoints,
                               const TrafficPattern& pattern, const SimOptions& opt = {});

// Weighted max-min fair rates. Flow f puts rate * weight on each listed
// channel; channels are dense indices into `capacity`.
struct FlowDemand {
  std::vector<std::pair<int, double>> channels;
};
std::vector<double> max_min_rates(const std::vector<double>& capacity,
                                  const std::vector<FlowDemand>& flows);

struct CollectiveResult {
  CollectiveKind kind = CollectiveKind::kRing;
  bool embedded = true;  // false when two rings fell back to one bidirectional ring
  double time_s = 0.0;
  double share_of_peak = 0.0;  // vs S over half the injection bandwidth
  BandwidthReport report;
};

// Rank-level schedule of an allreduce over `job`, ranks in job.nodes order.
// `embedded` reports whether two rings fell back to one.
TrafficPattern collective_pattern(const Topology& t, const JobGrid& job,
                                  const CollectiveSpec& spec, bool* embedded = nullptr);

CollectiveResult simulate_collective(const Topology& t, const JobGrid& job,
                                     const CollectiveSpec& spec, const SimOptions& opt = {});

// Job grid covering the whole accelerator grid (ports) or ranks 0..n-1 laid
// out as a near-square grid (switch-only families).
JobGrid whole_machine_grid(const Topology& t);

}  // namespace hxmesh
