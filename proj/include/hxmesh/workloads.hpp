#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hxmesh/collectives.hpp"
#include "hxmesh/simulator.hpp"
#include "hxmesh/topology.hpp"

namespace hxmesh {

struct WorkloadConfig {
  int D = 1;
  int P = 1;
  int O = 1;
  double M = 1.0;         // minibatch examples
  double n_params = 0.0;  // N_P
  double n_act = 0.0;     // N_A, elements per example at a cut layer
  double n_op = 0.0;      // N_O, operator words per pass
  double W = 4.0;         // bytes per word
  void validate() const;
  int accelerators() const { return D * P * O; }
};

struct CommVolumes {
  double v_d = 0.0;  // allreduce bytes per data-parallel replica
  double v_p = 0.0;  // pipeline send bytes per process
  double v_o = 0.0;  // operator bytes per pass
};
CommVolumes comm_volumes(const WorkloadConfig& w);

enum class OpKind { kAllreduce, kAlltoall, kAllgather, kReduceScatter, kSendRecv };
const char* to_string(OpKind k);
OpKind op_kind_from_string(const std::string& s);

// Ranks index the job grid row-major. Ring collectives embed the group as a
// rows x cols grid; send/recv groups are {src, dst}.
struct RankGroup {
  int rows = 1;
  int cols = 0;
  std::vector<int> ranks;
};

struct CommOp {
  OpKind kind = OpKind::kAllreduce;
  std::vector<RankGroup> groups;  // run concurrently
  double bytes = 0.0;  // allreduce/gather vector, alltoall send buffer, or message
  bool background = false;  // streamed alongside the other ops of the phase
  std::string label;
};

struct TracePhase {
  std::string label;
  double compute_s = 0.0;
  bool overlap = false;  // compute hides communication
  int repeat = 1;
  std::vector<CommOp> ops;
};

struct PhaseTrace {
  std::string name;
  WorkloadConfig config;
  int job_rows = 1;
  int job_cols = 1;
  std::vector<TracePhase> phases;

  double compute_s() const;
  void validate() const;
  nlohmann::json to_json() const;
  static PhaseTrace from_json(const nlohmann::json& j);
};

const std::vector<std::string>& dnn_presets();

// Overrides: D, P, O, M, examples, microbatches_in_flight, halo_depth,
// allreduce_groups. Unknown keys are rejected.
PhaseTrace build_dnn_trace(const std::string& preset, const nlohmann::json& overrides = {});

// Places a rows x cols job: board-aligned greedy allocation on HxMesh and
// HyperX, the top-left rectangle on a torus, consecutive ids elsewhere.
JobGrid place_job(const Topology& t, int rows, int cols);

struct PhaseTiming {
  std::string label;
  int repeat = 1;
  double compute_s = 0.0;
  double comm_s = 0.0;  // one instance
  double time_s = 0.0;  // one instance
  std::string algorithm;
};

struct IterationResult {
  double total_s = 0.0;
  double compute_s = 0.0;
  double overhead = 0.0;  // (total - compute) / compute
  std::vector<PhaseTiming> phases;
  nlohmann::json to_json() const;
};

IterationResult iteration_time(const PhaseTrace& trace, const Topology& t, const JobGrid& job,
                               const CostParams& cp = {});

// Savings of an HxMesh over another network: cost ratio times runtime ratio.
double cost_savings(double other_cost, double other_time, double hx_cost, double hx_time);

}  // namespace hxmesh
