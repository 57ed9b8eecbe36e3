#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hxmesh/collectives.hpp"
#include "hxmesh/topology.hpp"

namespace hxmesh {

// Board coordinates: row in [0, y), column in [0, x).
struct JobRequest {
  int id = 0;
  int u = 1;  // board rows
  int v = 1;  // board columns
};

// Squarest u x v with u <= v for a job of `boards` boards.
JobRequest square_job(int id, int boards);

struct Allocation {
  int job_id = 0;
  std::vector<int> rows;  // virtual row i -> physical board row
  std::vector<int> cols;  // virtual column j -> physical board column
  int u() const { return static_cast<int>(rows.size()); }
  int v() const { return static_cast<int>(cols.size()); }
  int size() const { return u() * v(); }
  std::vector<BoardCoord> boards() const;
};

enum class BoardStatus : std::uint8_t { kFree, kFailed, kAllocated };

class ClusterState {
 public:
  explicit ClusterState(const HxMeshParams& geometry);

  const HxMeshParams& geometry() const { return geom_; }
  int rows() const { return geom_.y; }
  int cols() const { return geom_.x; }
  int board_count() const { return rows() * cols(); }
  int free_count() const { return free_; }
  int failed_count() const { return failed_; }
  int allocated_count() const { return board_count() - free_ - failed_; }

  BoardStatus status(int row, int col) const;
  int owner(int row, int col) const;  // job id, -1 when not allocated
  const std::vector<Allocation>& allocations() const { return allocs_; }

  void mark_failed(int row, int col);
  void apply(const Allocation& a);
  void release(int job_id);

  // Free boards of a row as a bitset over columns.
  const std::vector<std::uint64_t>& free_mask(int row) const { return mask_[row]; }
  int free_in_row(int row) const { return row_free_[row]; }

 private:
  void set(int row, int col, BoardStatus s, int owner);

  HxMeshParams geom_;
  std::vector<BoardStatus> status_;
  std::vector<int> owner_;
  std::vector<std::vector<std::uint64_t>> mask_;
  std::vector<int> row_free_;
  std::vector<Allocation> allocs_;
  int free_ = 0;
  int failed_ = 0;
};

struct Heuristics {
  bool transpose = false;
  bool aspect = false;
  bool sort = false;  // experiment level: largest jobs first
  bool locality = false;
  int max_aspect = 8;
};
Heuristics heuristics_from_string(const std::string& s);  // e.g. "transpose,sort"
std::string to_string(const Heuristics& h);

// Greedy row-intersection search; on success the state records the job.
std::optional<Allocation> greedy_allocate(ClusterState& state, const JobRequest& job,
                                          const Heuristics& h = {});

bool is_valid_virtual_hxmesh(const std::vector<BoardCoord>& boards);

ClusterState inject_failures(const ClusterState& state, int n, std::uint64_t seed);

struct SizeDistribution {
  std::vector<std::pair<int, double>> entries;  // (boards, probability)
  void validate() const;
  int max_size() const;
};
// Non-authoritative default: heavy in small jobs, a thin tail of large ones.
// Sizes above `max_boards` are dropped and the rest renormalized.
SizeDistribution synthetic_distribution(int max_boards = 1 << 30);
SizeDistribution distribution_from_csv(const std::string& text);

struct JobTrace {
  std::vector<int> sizes;  // boards, in arrival order
  int total() const;
};

// Draws jobs until `capacity` boards are exactly filled. Draws that do not
// fit wait in `carry` and are offered first to the next mix.
class JobMixSampler {
 public:
  JobMixSampler(SizeDistribution d, std::uint64_t seed);
  JobTrace next(int capacity);
  const std::deque<int>& carry() const { return carry_; }

 private:
  int draw();
  SizeDistribution d_;
  std::vector<double> cdf_;
  std::mt19937_64 rng_;
  std::deque<int> carry_;
};

JobTrace sample_job_mix(const SizeDistribution& d, int capacity, std::uint64_t seed);
std::vector<JobTrace> sample_job_mixes(const SizeDistribution& d, int capacity, int count,
                                       std::uint64_t seed);

struct UtilizationStats {
  std::vector<double> per_trace;  // allocated / working boards
  double mean = 0.0;
  double median = 0.0;
  double p1 = 0.0;  // 99% of traces are at or above this
  double min = 0.0;
};
UtilizationStats summarize(std::vector<double> values);

// Allocates each trace on a copy of `state`.
UtilizationStats run_allocation_experiment(const std::vector<JobTrace>& traces,
                                           const ClusterState& state, const Heuristics& h);

enum class TrafficKind { kAlltoall, kAllreduce };

// Share of global-network traversals that climb above the first switch
// level, from the board layout of the line connectors.
double upper_level_traffic_fraction(const HxMeshParams& geometry, const Allocation& a,
                                    TrafficKind kind);
// Same quantity from the router's path sets on a built topology.
double routed_upper_level_fraction(const Topology& t, const Allocation& a, TrafficKind kind);

double defragment_time_estimate(double state_bytes, double injection_gbytes_s,
                                double global_fraction);

// Every pair of job boards can reach each other over some minimal path that
// only touches that job's boards and switches.
bool interference_check(const Topology& t, const std::vector<Allocation>& allocs);
bool interference_check(const Topology& t, const std::vector<std::vector<BoardCoord>>& jobs);

// Accelerators of an allocation as a row-major virtual grid.
JobGrid job_grid(const Topology& t, const Allocation& a);

}  // namespace hxmesh
