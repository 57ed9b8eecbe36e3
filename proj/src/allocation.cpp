#include "hxmesh/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hxmesh/routing.hpp"

namespace hxmesh {

JobRequest square_job(int id, int boards) {
  require(boards >= 1, "job needs at least one board");
  int u = static_cast<int>(std::sqrt(static_cast<double>(boards)));
  while (u > 1 && boards % u != 0) --u;
  return {id, u, boards / u};
}

std::vector<BoardCoord> Allocation::boards() const {
  std::vector<BoardCoord> out;
  for (int r : rows) {
    for (int c : cols) out.push_back({r, c});
  }
  return out;
}

// ---------------------------------------------------------------------------

ClusterState::ClusterState(const HxMeshParams& geometry) : geom_(geometry) {
  require(geom_.x >= 1 && geom_.y >= 1, "board grid must be non-empty");
  const int words = (geom_.x + 63) / 64;
  status_.assign(static_cast<std::size_t>(board_count()), BoardStatus::kFree);
  owner_.assign(status_.size(), -1);
  mask_.assign(geom_.y, std::vector<std::uint64_t>(words, 0));
  row_free_.assign(geom_.y, geom_.x);
  for (int r = 0; r < geom_.y; ++r) {
    for (int c = 0; c < geom_.x; ++c) mask_[r][c / 64] |= 1ULL << (c % 64);
  }
  free_ = board_count();
}

BoardStatus ClusterState::status(int row, int col) const {
  require(row >= 0 && row < rows() && col >= 0 && col < cols(), "board outside the grid");
  return status_[static_cast<std::size_t>(row) * cols() + col];
}

int ClusterState::owner(int row, int col) const {
  status(row, col);
  return owner_[static_cast<std::size_t>(row) * cols() + col];
}

void ClusterState::set(int row, int col, BoardStatus s, int owner) {
  const std::size_t i = static_cast<std::size_t>(row) * cols() + col;
  const BoardStatus old = status_[i];
  if (old == BoardStatus::kFree) {
    --free_;
    --row_free_[row];
    mask_[row][col / 64] &= ~(1ULL << (col % 64));
  }
  if (old == BoardStatus::kFailed) --failed_;
  if (s == BoardStatus::kFree) {
    ++free_;
    ++row_free_[row];
    mask_[row][col / 64] |= 1ULL << (col % 64);
  }
  if (s == BoardStatus::kFailed) ++failed_;
  status_[i] = s;
  owner_[i] = owner;
}

void ClusterState::mark_failed(int row, int col) {
  if (status(row, col) == BoardStatus::kAllocated) release(owner(row, col));
  set(row, col, BoardStatus::kFailed, -1);
}

void ClusterState::apply(const Allocation& a) {
  require(is_valid_virtual_hxmesh(a.boards()), "allocation is not a virtual sub-HxMesh");
  for (const BoardCoord& b : a.boards()) {
    require(status(b.row, b.col) == BoardStatus::kFree,
            "board (" + std::to_string(b.row) + "," + std::to_string(b.col) + ") is not free");
  }
  for (const BoardCoord& b : a.boards()) set(b.row, b.col, BoardStatus::kAllocated, a.job_id);
  allocs_.push_back(a);
}

void ClusterState::release(int job_id) {
  auto it = std::find_if(allocs_.begin(), allocs_.end(),
                         [&](const Allocation& a) { return a.job_id == job_id; });
  require(it != allocs_.end(), "job " + std::to_string(job_id) + " is not allocated");
  for (const BoardCoord& b : it->boards()) set(b.row, b.col, BoardStatus::kFree, -1);
  allocs_.erase(it);
}

// ---------------------------------------------------------------------------

Heuristics heuristics_from_string(const std::string& s) {
  Heuristics h;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "base" || item == "none") continue;
    if (item == "transpose") h.transpose = true;
    else if (item == "aspect") h.aspect = true;
    else if (item == "sort") h.sort = true;
    else if (item == "locality") h.locality = true;
    else fail(ErrorCode::kParse, "unknown heuristic '" + item + "'");
  }
  return h;
}

std::string to_string(const Heuristics& h) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(h.transpose, "transpose");
  add(h.aspect, "aspect");
  add(h.sort, "sort");
  add(h.locality, "locality");
  return out.empty() ? "base" : out;
}

namespace {

using Mask = std::vector<std::uint64_t>;

int popcount(const Mask& m) {
  int n = 0;
  for (auto w : m) n += std::popcount(w);
  return n;
}

// Boards per first-level switch along a line of q board ports, 0 when the
// line has no upper level.
int boards_per_leaf(const HxMeshParams& g, int boards_on_line) {
  const int q = 2 * boards_on_line;
  if (q <= 2) return 0;
  const bool tree = g.global_kind == GlobalKind::kFatTree ||
                    (g.global_kind == GlobalKind::kAuto && q > g.radix);
  if (!tree) return 0;
  return std::max(1, g.radix / 4);
}

std::vector<int> first_columns(const Mask& m, int v) {
  std::vector<int> out;
  for (std::size_t w = 0; w < m.size() && static_cast<int>(out.size()) < v; ++w) {
    std::uint64_t bits = m[w];
    while (bits && static_cast<int>(out.size()) < v) {
      out.push_back(static_cast<int>(w * 64 + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

// Fill from the leaf groups holding the most free columns.
std::vector<int> local_columns(const Mask& m, int v, int per_leaf) {
  if (per_leaf <= 0) return first_columns(m, v);
  std::map<int, std::vector<int>> groups;
  for (int c : first_columns(m, popcount(m))) groups[c / per_leaf].push_back(c);
  std::vector<std::pair<int, int>> order;  // (-count, group)
  for (const auto& [g, cs] : groups) order.push_back({-static_cast<int>(cs.size()), g});
  std::sort(order.begin(), order.end());
  std::vector<int> out;
  for (auto [neg, g] : order) {
    for (int c : groups[g]) {
      if (static_cast<int>(out.size()) == v) break;
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// One greedy pass per start row; returns at most `limit` placements.
std::vector<Allocation> find_blocks(const ClusterState& s, int u, int v, std::size_t limit,
                                    bool locality) {
  std::vector<Allocation> found;
  if (u > s.rows() || v > s.cols() || u * v > s.free_count()) return found;
  std::vector<int> candidates;
  for (int r = 0; r < s.rows(); ++r) {
    if (s.free_in_row(r) >= v) candidates.push_back(r);
  }
  if (static_cast<int>(candidates.size()) < u) return found;
  const int per_leaf = locality ? boards_per_leaf(s.geometry(), s.cols()) : 0;
  for (std::size_t si = 0; si < candidates.size() && found.size() < limit; ++si) {
    const int start = candidates[si];
    Mask cur = s.free_mask(start);
    std::vector<int> rows{start};
    for (std::size_t ri = 0; ri < candidates.size() && static_cast<int>(rows.size()) < u; ++ri) {
      const int r = candidates[ri];
      if (r == start) continue;
      Mask next = cur;
      const Mask& m = s.free_mask(r);
      for (std::size_t w = 0; w < next.size(); ++w) next[w] &= m[w];
      if (popcount(next) >= v) {
        cur = std::move(next);
        rows.push_back(r);
      }
    }
    if (static_cast<int>(rows.size()) < u) continue;
    std::sort(rows.begin(), rows.end());
    Allocation a;
    a.rows = std::move(rows);
    a.cols = locality ? local_columns(cur, v, per_leaf) : first_columns(cur, v);
    found.push_back(std::move(a));
  }
  return found;
}

std::vector<std::pair<int, int>> candidate_shapes(const JobRequest& job, const Heuristics& h) {
  std::vector<std::pair<int, int>> shapes;
  auto add = [&](int u, int v) {
    if (std::find(shapes.begin(), shapes.end(), std::make_pair(u, v)) == shapes.end()) {
      shapes.emplace_back(u, v);
    }
  };
  add(job.u, job.v);
  if (h.transpose) add(job.v, job.u);
  if (h.aspect) {
    const int n = job.u * job.v;
    for (int a = static_cast<int>(std::sqrt(static_cast<double>(n))); a >= 1; --a) {
      if (n % a != 0) continue;
      const int b = n / a;
      if (b > a * h.max_aspect) continue;
      add(a, b);
      if (h.transpose) add(b, a);
    }
  }
  return shapes;
}

}  // namespace

std::optional<Allocation> greedy_allocate(ClusterState& state, const JobRequest& job,
                                          const Heuristics& h) {
  require(job.u >= 1 && job.v >= 1, "job dimensions must be positive");
  std::optional<Allocation> best;
  double best_score = 2.0;
  for (auto [u, v] : candidate_shapes(job, h)) {
    if (!h.locality) {
      auto found = find_blocks(state, u, v, 1, false);
      if (!found.empty()) {
        best = std::move(found.front());
        break;
      }
      continue;
    }
    for (Allocation& a : find_blocks(state, u, v, 8, true)) {
      const double score =
          upper_level_traffic_fraction(state.geometry(), a, TrafficKind::kAlltoall);
      if (score < best_score - 1e-12) {
        best_score = score;
        best = std::move(a);
      }
    }
  }
  if (!best) return std::nullopt;
  best->job_id = job.id;
  state.apply(*best);
  return best;
}

bool is_valid_virtual_hxmesh(const std::vector<BoardCoord>& boards) {
  if (boards.empty()) return false;
  std::map<int, std::set<int>> by_row;
  std::set<std::pair<int, int>> seen;
  for (const BoardCoord& b : boards) {
    if (!seen.insert({b.row, b.col}).second) return false;
    by_row[b.row].insert(b.col);
  }
  const std::set<int>& cols = by_row.begin()->second;
  for (const auto& [r, cs] : by_row) {
    if (cs != cols) return false;
  }
  return true;
}

ClusterState inject_failures(const ClusterState& state, int n, std::uint64_t seed) {
  require(n >= 0, "failure count must be non-negative");
  std::vector<int> free;
  for (int r = 0; r < state.rows(); ++r) {
    for (int c = 0; c < state.cols(); ++c) {
      if (state.status(r, c) == BoardStatus::kFree) free.push_back(r * state.cols() + c);
    }
  }
  require(n <= static_cast<int>(free.size()),
          "cannot fail " + std::to_string(n) + " boards, only " + std::to_string(free.size()) +
              " are free");
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n entries are a uniform sample.
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(free.size()) - 1);
    std::swap(free[i], free[pick(rng)]);
  }
  ClusterState out = state;
  for (int i = 0; i < n; ++i) out.mark_failed(free[i] / state.cols(), free[i] % state.cols());
  return out;
}

// ---------------------------------------------------------------------------

void SizeDistribution::validate() const {
  require(!entries.empty(), "size distribution is empty");
  double sum = 0.0;
  for (auto [size, prob] : entries) {
    require(size >= 1, "job sizes must be at least one board");
    require(prob >= 0.0, "probabilities must be non-negative");
    sum += prob;
  }
  require(std::abs(sum - 1.0) < 1e-6, "probabilities sum to " + std::to_string(sum) + ", not 1");
}

int SizeDistribution::max_size() const {
  int m = 0;
  for (auto [size, prob] : entries) {
    if (prob > 0.0) m = std::max(m, size);
  }
  return m;
}

SizeDistribution synthetic_distribution(int max_boards) {
  static const std::pair<int, double> shape[] = {
      {1, 0.30}, {2, 0.20}, {3, 0.05}, {4, 0.15}, {6, 0.04}, {8, 0.10},
      {12, 0.03}, {16, 0.06}, {24, 0.02}, {32, 0.03}, {64, 0.015}, {128, 0.005}};
  SizeDistribution d;
  double sum = 0.0;
  for (auto e : shape) {
    if (e.first > max_boards) continue;
    d.entries.push_back(e);
    sum += e.second;
  }
  require(!d.entries.empty(), "no synthetic job size fits");
  for (auto& e : d.entries) e.second /= sum;
  return d;
}

SizeDistribution distribution_from_csv(const std::string& text) {
  SizeDistribution d;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::kParse, "line " + std::to_string(lineno) + ": expected size,probability");
    try {
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      if (lineno == 1 && !a.empty() && !std::isdigit(static_cast<unsigned char>(a[0]))) continue;
      d.entries.push_back({std::stoi(a), std::stod(b)});
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  d.validate();
  return d;
}

int JobTrace::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

JobMixSampler::JobMixSampler(SizeDistribution d, std::uint64_t seed)
    : d_(std::move(d)), rng_(seed) {
  d_.validate();
  double acc = 0.0;
  for (auto [size, prob] : d_.entries) {
    acc += prob;
    cdf_.push_back(acc);
  }
}

int JobMixSampler::draw() {
  const double x = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng_);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
  return d_.entries[std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1)].first;
}

JobTrace JobMixSampler::next(int capacity) {
  require(capacity >= d_.max_size(), "capacity " + std::to_string(capacity) +
                                         " is below the largest job size " +
                                         std::to_string(d_.max_size()));
  int smallest = d_.max_size();
  for (auto [size, prob] : d_.entries) {
    if (prob > 0.0) smallest = std::min(smallest, size);
  }
  JobTrace t;
  int remaining = capacity;
  for (auto it = carry_.begin(); it != carry_.end();) {
    if (*it <= remaining) {
      t.sizes.push_back(*it);
      remaining -= *it;
      it = carry_.erase(it);
    } else {
      ++it;
    }
  }
  while (remaining >= smallest) {
    const int s = draw();
    if (s <= remaining) {
      t.sizes.push_back(s);
      remaining -= s;
    } else {
      carry_.push_back(s);
    }
  }
  return t;
}

JobTrace sample_job_mix(const SizeDistribution& d, int capacity, std::uint64_t seed) {
  JobMixSampler s(d, seed);
  return s.next(capacity);
}

std::vector<JobTrace> sample_job_mixes(const SizeDistribution& d, int capacity, int count,
                                       std::uint64_t seed) {
  JobMixSampler s(d, seed);
  std::vector<JobTrace> out;
  for (int i = 0; i < count; ++i) out.push_back(s.next(capacity));
  return out;
}

UtilizationStats summarize(std::vector<double> values) {
  UtilizationStats s;
  s.per_trace = values;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.p1 = values[static_cast<std::size_t>(std::floor(0.01 * (n - 1)))];
  s.min = values.front();
  return s;
}

UtilizationStats run_allocation_experiment(const std::vector<JobTrace>& traces,
                                           const ClusterState& state, const Heuristics& h) {
  std::vector<double> util;
  const int working = state.board_count() - state.failed_count();
  for (const JobTrace& t : traces) {
    ClusterState s = state;
    std::vector<int> order(t.sizes.size());
    std::iota(order.begin(), order.end(), 0);
    if (h.sort) {
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return t.sizes[a] > t.sizes[b]; });
    }
    const int before = s.allocated_count();
    for (int i : order) {
      greedy_allocate(s, square_job(1000000 + i, t.sizes[i]), h);
    }
    util.push_back(working > 0 ? static_cast<double>(s.allocated_count() - before) / working
                               : 0.0);
  }
  return summarize(std::move(util));
}

// ---------------------------------------------------------------------------

namespace {

// Ordered pairs of distinct entries that sit on different first-level switches.
long long cross_leaf_pairs(const std::vector<int>& idx, int per_leaf) {
  if (per_leaf <= 0) return 0;
  std::map<int, long long> groups;
  for (int i : idx) ++groups[i / per_leaf];
  const long long n = static_cast<long long>(idx.size());
  long long same = 0;
  for (const auto& [g, c] : groups) same += c * (c - 1);
  return n * (n - 1) - same;
}

bool cross_leaf(int i, int j, int per_leaf) {
  return per_leaf > 0 && i / per_leaf != j / per_leaf;
}

}  // namespace

double upper_level_traffic_fraction(const HxMeshParams& g, const Allocation& a,
                                    TrafficKind kind) {
  const int col_leaf = boards_per_leaf(g, g.x);  // row lines span the columns
  const int row_leaf = boards_per_leaf(g, g.y);
  const long long u = a.u(), v = a.v();
  if (kind == TrafficKind::kAlltoall) {
    const long long dc = cross_leaf_pairs(a.cols, col_leaf);
    const long long dr = cross_leaf_pairs(a.rows, row_leaf);
    const long long trav = u * v * (v - 1) + v * u * (u - 1) + 2 * u * (u - 1) * v * (v - 1);
    if (trav == 0) return 0.0;
    return static_cast<double>(u * u * dc + v * v * dr) / static_cast<double>(trav);
  }
  // Ring neighbours in the virtual grid, wrap-around included. A single
  // board along a dimension wraps inside the board.
  long long up = 0, trav = 0;
  for (long long j = 0; j < v && v > 1; ++j) {
    trav += u;
    if (cross_leaf(a.cols[j], a.cols[(j + 1) % v], col_leaf)) up += u;
  }
  for (long long i = 0; i < u && u > 1; ++i) {
    trav += v;
    if (cross_leaf(a.rows[i], a.rows[(i + 1) % u], row_leaf)) up += v;
  }
  return trav == 0 ? 0.0 : static_cast<double>(up) / static_cast<double>(trav);
}

double routed_upper_level_fraction(const Topology& t, const Allocation& a, TrafficKind kind) {
  require(t.is_hxmesh(), "upper-level traffic needs an HxMesh");
  const auto& l = t.layout();
  Router router(t);
  double up = 0.0, trav = 0.0;
  auto account = [&](NodeId s, NodeId d) {
    for (const ChannelWeight& w : router.channel_weights(s, d)) {
      const NodeId from = channel_source(t, w.channel), to = channel_target(t, w.channel);
      if (t.is_accelerator(from) && !t.is_accelerator(to)) trav += w.weight;
      if (!t.is_accelerator(from) && !t.is_accelerator(to) && t.node(to).level > t.node(from).level) {
        up += w.weight;
      }
    }
  };
  if (kind == TrafficKind::kAlltoall) {
    for (int r1 : a.rows) {
      for (int c1 : a.cols) {
        for (int r2 : a.rows) {
          for (int c2 : a.cols) {
            if (r1 == r2 && c1 == c2) continue;
            account(t.accelerator_at(c1 * l.board_a, r1 * l.board_b),
                    t.accelerator_at(c2 * l.board_a, r2 * l.board_b));
          }
        }
      }
    }
  } else {
    const JobGrid g = job_grid(t, a);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) {
        if (c % l.board_a == l.board_a - 1) account(g.at(r, c), g.at(r, (c + 1) % g.cols));
        if (r % l.board_b == l.board_b - 1) account(g.at(r, c), g.at((r + 1) % g.rows, c));
      }
    }
  }
  return trav == 0.0 ? 0.0 : up / trav;
}

double defragment_time_estimate(double state_bytes, double injection_gbytes_s,
                                double global_fraction) {
  require(state_bytes >= 0.0, "state size must be non-negative");
  require(injection_gbytes_s > 0.0, "injection bandwidth must be positive");
  require(global_fraction > 0.0 && global_fraction <= 1.0, "global fraction must be in (0, 1]");
  return state_bytes / (injection_gbytes_s * 1e9 * global_fraction);
}

bool interference_check(const Topology& t, const std::vector<Allocation>& allocs) {
  std::vector<std::vector<BoardCoord>> jobs;
  for (const Allocation& a : allocs) jobs.push_back(a.boards());
  return interference_check(t, jobs);
}

bool interference_check(const Topology& t, const std::vector<std::vector<BoardCoord>>& jobs) {
  require(t.is_hxmesh(), "interference check needs an HxMesh");
  const auto& l = t.layout();
  for (const auto& boards : jobs) {
    std::vector<char> allowed(t.node_count(), 0);
    for (const BoardCoord& b : boards) {
      for (int dy = 0; dy < l.board_b; ++dy) {
        for (int dx = 0; dx < l.board_a; ++dx) {
          allowed[t.accelerator_at(b.col * l.board_a + dx, b.row * l.board_b + dy)] = 1;
        }
      }
    }
    Router router(t);
    router.set_allowed(allowed);
    for (const BoardCoord& s : boards) {
      for (const BoardCoord& d : boards) {
        if (s.row == d.row && s.col == d.col) continue;
        // Opposite corners of each board stand in for all its accelerators.
        for (int k = 0; k < 2; ++k) {
          const NodeId src = t.accelerator_at(s.col * l.board_a + k * (l.board_a - 1),
                                              s.row * l.board_b + k * (l.board_b - 1));
          const NodeId dst = t.accelerator_at(d.col * l.board_a + (1 - k) * (l.board_a - 1),
                                              d.row * l.board_b + (1 - k) * (l.board_b - 1));
          try {
            if (router.path_count(src, dst) <= 0.0) return false;
          } catch (const Error&) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

JobGrid job_grid(const Topology& t, const Allocation& a) {
  const auto& l = t.layout();
  JobGrid g;
  g.rows = a.u() * l.board_b;
  g.cols = a.v() * l.board_a;
  for (int i = 0; i < a.u(); ++i) {
    for (int dy = 0; dy < l.board_b; ++dy) {
      for (int j = 0; j < a.v(); ++j) {
        for (int dx = 0; dx < l.board_a; ++dx) {
          g.nodes.push_back(t.accelerator_at(a.cols[j] * l.board_a + dx, a.rows[i] * l.board_b + dy));
        }
      }
    }
  }
  return g;
}

}  // namespace hxmesh
