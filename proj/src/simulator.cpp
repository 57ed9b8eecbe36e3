#include "hxmesh/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace hxmesh {

const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::kAlltoall: return "alltoall";
    case PatternKind::kPermutation: return "permutation";
    case PatternKind::kRingAllreduce: return "ring_allreduce";
    case PatternKind::kBidirRingAllreduce: return "bidir_ring_allreduce";
    case PatternKind::kTwoRingsAllreduce: return "two_rings_allreduce";
    case PatternKind::kTorus2dAllreduce: return "torus2d_allreduce";
  }
  return "?";
}

PatternKind pattern_from_string(const std::string& s) {
  for (auto k : {PatternKind::kAlltoall, PatternKind::kPermutation, PatternKind::kRingAllreduce,
                 PatternKind::kBidirRingAllreduce, PatternKind::kTwoRingsAllreduce,
                 PatternKind::kTorus2dAllreduce}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::kParse, "unknown traffic pattern '" + s + "'");
}

namespace {

Port port_from_string(const std::string& s) {
  for (Port p : {Port::kEast, Port::kWest, Port::kNorth, Port::kSouth, Port::kNone}) {
    if (s == to_string(p)) return p;
  }
  fail(ErrorCode::kParse, "unknown port '" + s + "'");
}

// Reduce-scatter then allgather along each ring direction.
TrafficPattern ring_pattern(PatternKind kind, const RingEmbedding& e, int p, double bytes) {
  TrafficPattern tp;
  tp.kind = to_string(kind);
  tp.participants = p;
  std::vector<const std::vector<RingStep>*> dirs;
  if (kind == PatternKind::kRingAllreduce) {
    dirs = {&e.forward[0]};
  } else if (kind == PatternKind::kBidirRingAllreduce || !e.two_rings) {
    dirs = {&e.forward[0], &e.backward[0]};
  } else {
    dirs = {&e.forward[0], &e.backward[0], &e.forward[1], &e.backward[1]};
  }
  if (kind == PatternKind::kTwoRingsAllreduce && !e.two_rings) tp.kind += " (one bidirectional ring)";
  const double chunk = bytes / (static_cast<double>(p) * static_cast<double>(dirs.size()));
  Phase ph;
  ph.repeat = p - 1;
  for (const auto* d : dirs) {
    for (const RingStep& s : *d) ph.flows.push_back({s.from, s.to, chunk, s.exit});
  }
  ph.label = "reduce-scatter";
  tp.phases.push_back(ph);
  ph.label = "allgather";
  tp.phases.push_back(std::move(ph));
  return tp;
}

// Two half-size orientations run side by side, each bidirectional: one does
// rows, columns, rows; the other columns, rows, columns.
TrafficPattern torus2d_pattern(int n, double bytes) {
  TrafficPattern tp;
  tp.kind = to_string(PatternKind::kTorus2dAllreduce);
  tp.participants = n * n;
  auto rank = [n](int r, int c) { return ((r + n) % n) * n + (c + n) % n; };
  auto add_row = [&](Phase& ph, double b) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        ph.flows.push_back({rank(r, c), rank(r, c + 1), b, Port::kEast});
        ph.flows.push_back({rank(r, c), rank(r, c - 1), b, Port::kWest});
      }
    }
  };
  auto add_col = [&](Phase& ph, double b) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        ph.flows.push_back({rank(r, c), rank(r + 1, c), b, Port::kNorth});
        ph.flows.push_back({rank(r, c), rank(r - 1, c), b, Port::kSouth});
      }
    }
  };
  const double outer = bytes / (4.0 * n);
  const double inner = bytes / (4.0 * n * n);
  Phase first{{}, n - 1, 0.0, false, "first-dimension reduce-scatter"};
  add_row(first, outer);
  add_col(first, outer);
  Phase middle{{}, 2 * (n - 1), 0.0, false, "second-dimension allreduce"};
  add_col(middle, inner);
  add_row(middle, inner);
  Phase last{{}, n - 1, 0.0, false, "first-dimension allgather"};
  add_row(last, outer);
  add_col(last, outer);
  tp.phases = {std::move(first), std::move(middle), std::move(last)};
  return tp;
}

TrafficPattern tree_pattern(int p, double bytes) {
  TrafficPattern tp;
  tp.kind = to_string(CollectiveKind::kTree);
  tp.participants = p;
  std::vector<Phase> reduce;
  for (int step = 1; step < p; step *= 2) {
    Phase ph{{}, 1, 0.0, false, "reduce"};
    for (int r = step; r < p; r += 2 * step) ph.flows.push_back({r, r - step, bytes});
    reduce.push_back(std::move(ph));
  }
  tp.phases = reduce;
  for (auto it = reduce.rbegin(); it != reduce.rend(); ++it) {
    Phase ph = *it;
    ph.label = "broadcast";
    for (Flow& f : ph.flows) std::swap(f.src, f.dst);
    tp.phases.push_back(std::move(ph));
  }
  return tp;
}

}  // namespace

TrafficPattern make_pattern(PatternKind kind, const PatternParams& params) {
  require(params.bytes > 0.0, "message size must be positive");
  const int p = params.p;
  require(p >= 2, "traffic pattern needs at least two participants");
  TrafficPattern tp;
  tp.kind = to_string(kind);
  tp.participants = p;
  switch (kind) {
    case PatternKind::kAlltoall:
      for (int i = 1; i < p; ++i) {
        Phase ph;
        ph.label = "shift " + std::to_string(i);
        for (int j = 0; j < p; ++j) ph.flows.push_back({j, (j + i) % p, params.bytes});
        tp.phases.push_back(std::move(ph));
      }
      return tp;
    case PatternKind::kPermutation: {
      std::mt19937_64 rng(params.seed);
      std::vector<int> peer(p);
      std::iota(peer.begin(), peer.end(), 0);
      // Rejection sampling keeps the derangement uniform.
      for (;;) {
        std::shuffle(peer.begin(), peer.end(), rng);
        bool fixed = false;
        for (int j = 0; j < p && !fixed; ++j) fixed = peer[j] == j;
        if (!fixed) break;
      }
      Phase ph;
      ph.label = "permutation";
      for (int j = 0; j < p; ++j) ph.flows.push_back({j, peer[j], params.bytes});
      tp.phases.push_back(std::move(ph));
      return tp;
    }
    case PatternKind::kTorus2dAllreduce: {
      require(is_perfect_square(p), "torus2d needs a square participant count, got " +
                                        std::to_string(p));
      return torus2d_pattern(static_cast<int>(std::lround(std::sqrt(p))), params.bytes);
    }
    default: break;
  }
  int rows = params.rows, cols = params.cols;
  if (rows == 0 && cols == 0) {
    rows = 1;
    cols = p;
  }
  require(rows * cols == p, "job grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " does not hold " + std::to_string(p) + " ranks");
  return ring_pattern(kind, plan_rings(rows, cols), p, params.bytes);
}

void validate_pattern(const TrafficPattern& pattern) {
  require(pattern.participants >= 1, "pattern needs participants");
  for (const Phase& ph : pattern.phases) {
    require(ph.repeat >= 0, "phase repeat must be non-negative");
    require(ph.compute_s >= 0.0, "compute time must be non-negative");
    for (const Flow& f : ph.flows) {
      require(f.src >= 0 && f.src < pattern.participants && f.dst >= 0 &&
                  f.dst < pattern.participants,
              "flow endpoint outside the participant range");
      require(f.src != f.dst, "flow from rank " + std::to_string(f.src) + " to itself");
      require(f.bytes > 0.0, "flow size must be positive");
    }
  }
}

nlohmann::json pattern_to_json(const TrafficPattern& pattern) {
  nlohmann::json phases = nlohmann::json::array();
  for (const Phase& ph : pattern.phases) {
    nlohmann::json flows = nlohmann::json::array();
    for (const Flow& f : ph.flows) {
      nlohmann::json row = {f.src, f.dst, f.bytes};
      if (f.exit != Port::kNone) row.push_back(to_string(f.exit));
      flows.push_back(std::move(row));
    }
    phases.push_back({{"label", ph.label},
                      {"repeat", ph.repeat},
                      {"compute_s", ph.compute_s},
                      {"overlap", ph.overlap},
                      {"flows", std::move(flows)}});
  }
  return {{"kind", pattern.kind}, {"participants", pattern.participants}, {"phases", phases}};
}

TrafficPattern pattern_from_json(const nlohmann::json& j) {
  TrafficPattern tp;
  try {
    tp.kind = j.value("kind", std::string("custom"));
    tp.participants = j.at("participants").get<int>();
    for (const auto& jp : j.at("phases")) {
      Phase ph;
      ph.label = jp.value("label", std::string());
      ph.repeat = jp.value("repeat", 1);
      ph.compute_s = jp.value("compute_s", 0.0);
      ph.overlap = jp.value("overlap", false);
      for (const auto& jf : jp.at("flows")) {
        Flow f{jf.at(0).get<int>(), jf.at(1).get<int>(), jf.at(2).get<double>()};
        if (jf.size() > 3) f.exit = port_from_string(jf.at(3).get<std::string>());
        ph.flows.push_back(f);
      }
      tp.phases.push_back(std::move(ph));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad traffic pattern: ") + e.what());
  }
  validate_pattern(tp);
  return tp;
}

// ---------------------------------------------------------------------------

std::vector<double> max_min_rates(const std::vector<double>& capacity,
                                  const std::vector<FlowDemand>& flows) {
  const std::size_t nc = capacity.size();
  std::vector<double> rate(flows.size(), 0.0);
  std::vector<double> weight(nc, 0.0), frozen(nc, 0.0);
  std::vector<int> active_on(nc, 0);
  std::vector<std::vector<int>> users(nc);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    require(!flows[f].channels.empty(), "flow crosses no channel");
    for (auto [c, w] : flows[f].channels) {
      require(c >= 0 && static_cast<std::size_t>(c) < nc, "flow channel out of range");
      require(w > 0.0, "flow weight must be positive");
      weight[c] += w;
      ++active_on[c];
      users[c].push_back(static_cast<int>(f));
    }
  }
  for (double cap : capacity) require(cap > 0.0, "zero-capacity link");
  std::vector<char> done(flows.size(), 0);
  std::size_t remaining = flows.size();
  std::vector<int> live;
  for (std::size_t c = 0; c < nc; ++c) {
    if (active_on[c] > 0) live.push_back(static_cast<int>(c));
  }
  while (remaining > 0) {
    double level = std::numeric_limits<double>::infinity();
    for (int c : live) {
      if (active_on[c] == 0) continue;
      level = std::min(level, (capacity[c] - frozen[c]) / weight[c]);
    }
    level = std::max(level, 0.0);
    const double cut = level * (1.0 + 1e-12) + 1e-300;
    std::vector<int> next_live;
    std::vector<int> saturated;
    for (int c : live) {
      if (active_on[c] == 0) continue;
      if ((capacity[c] - frozen[c]) / weight[c] <= cut) {
        saturated.push_back(c);
      } else {
        next_live.push_back(c);
      }
    }
    for (int c : saturated) {
      for (int f : users[c]) {
        if (done[f]) continue;
        done[f] = 1;
        --remaining;
        rate[f] = level;
        for (auto [k, w] : flows[f].channels) {
          frozen[k] += w * level;
          weight[k] -= w;
          --active_on[k];
        }
      }
    }
    // Rebuild channel weights from scratch once they are near zero to keep
    // round-off from leaking into later levels.
    for (int c : next_live) {
      if (active_on[c] > 0 && weight[c] <= 1e-12) {
        double w = 0.0;
        for (int f : users[c]) {
          if (done[f]) continue;
          for (auto [k, x] : flows[f].channels) if (k == c) w += x;
        }
        weight[c] = w;
      }
    }
    live = std::move(next_live);
  }
  return rate;
}

// ---------------------------------------------------------------------------

namespace {

struct PhaseOutcome {
  double comm_s = 0.0;  // without alpha
  std::vector<double> finish;  // per flow
  double max_link_load = 0.0;
};

class FlowEngine {
 public:
  FlowEngine(const Topology& t, const std::vector<NodeId>& endpoints, const SimOptions& opt)
      : t_(t), endpoints_(endpoints), opt_(opt), router_(t), dense_(2 * t.link_count(), -1) {
    scale_ = t.planes();
    if (opt.restrict_to_job && t.has_ports() &&
        static_cast<int>(endpoints.size()) < t.accelerator_count()) {
      std::vector<char> allowed(t.node_count(), 0);
      if (t.is_hxmesh()) {
        std::vector<BoardCoord> boards;
        for (NodeId n : endpoints) boards.push_back(t.board_of(n));
        for (NodeId n = 0; n < t.accelerator_count(); ++n) {
          const BoardCoord b = t.board_of(n);
          for (const BoardCoord& k : boards) {
            if (k.row == b.row && k.col == b.col) {
              allowed[n] = 1;
              break;
            }
          }
        }
      } else {
        for (NodeId n : endpoints) allowed[n] = 1;
      }
      router_.set_allowed(std::move(allowed));
    }
  }

  PhaseOutcome run(const Phase& ph) {
    PhaseOutcome out;
    out.finish.assign(ph.flows.size(), 0.0);
    if (ph.flows.empty()) return out;
    touched_.clear();
    capacity_.clear();
    std::vector<FlowDemand> demand(ph.flows.size());
    if (opt_.split == SplitMode::kBestPath) {
      assign_best_paths(ph, demand);
    } else {
      for (std::size_t i = 0; i < ph.flows.size(); ++i) {
        for (const ChannelWeight& w : weights(ph.flows[i])) {
          demand[i].channels.push_back({dense(w.channel), w.weight});
        }
      }
    }
    for (int c : touched_) dense_[c] = -1;

    std::vector<double> bits(ph.flows.size());
    for (std::size_t i = 0; i < ph.flows.size(); ++i) bits[i] = ph.flows[i].bytes * 8.0;
    std::vector<int> active(ph.flows.size());
    std::iota(active.begin(), active.end(), 0);
    double now = 0.0;
    std::vector<FlowDemand> sub;
    while (!active.empty()) {
      sub.clear();
      for (int f : active) sub.push_back(demand[f]);
      const std::vector<double> rate = max_min_rates(capacity_, sub);
      std::vector<double> load(capacity_.size(), 0.0);
      for (std::size_t i = 0; i < sub.size(); ++i) {
        for (auto [c, w] : sub[i].channels) load[c] += w * rate[i];
      }
      for (std::size_t c = 0; c < load.size(); ++c) {
        out.max_link_load = std::max(out.max_link_load, load[c] / capacity_[c]);
      }
      double dt = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < active.size(); ++i) {
        dt = std::min(dt, bits[active[i]] / (rate[i] * 1e9));
      }
      now += dt;
      std::vector<int> still;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const int f = active[i];
        bits[f] -= rate[i] * 1e9 * dt;
        if (bits[f] <= 1e-9 * ph.flows[f].bytes * 8.0) {
          out.finish[f] = now;
        } else {
          still.push_back(f);
        }
      }
      active = std::move(still);
    }
    out.comm_s = now;
    return out;
  }

  double injection_gbps() const {
    double sum = 0.0;
    for (NodeId n : endpoints_) {
      for (const Adjacent& a : t_.neighbors(n, 0)) sum += t_.link(a.link).capacity_gbps;
    }
    return sum * scale_ / static_cast<double>(endpoints_.size());
  }

 private:
  int dense(ChannelId c) {
    if (dense_[c] < 0) {
      dense_[c] = static_cast<int>(capacity_.size());
      capacity_.push_back(t_.link(channel_link(c)).capacity_gbps * scale_);
      touched_.push_back(c);
    }
    return dense_[c];
  }

  std::vector<ChannelWeight> weights(const Flow& f) {
    const NodeId s = endpoints_[f.src], d = endpoints_[f.dst];
    if (f.exit != Port::kNone && t_.has_ports()) {
      try {
        const auto routes = pinned_routes(t_, s, f.exit, d);
        std::map<ChannelId, double> acc;
        for (const Path& p : routes) {
          for (const Hop& h : p.hops) acc[h.channel] += 1.0 / routes.size();
        }
        std::vector<ChannelWeight> out;
        for (auto [c, w] : acc) out.push_back({c, w});
        return out;
      } catch (const Error& e) {
        // Grids whose wrap-around is not a physical port neighbour route minimally.
        if (e.code() != ErrorCode::kNotConstructible) throw;
      }
    }
    return router_.channel_weights(s, d);
  }

  // Greedy: each flow takes the candidate path whose busiest channel carries
  // the least demand so far.
  void assign_best_paths(const Phase& ph, std::vector<FlowDemand>& demand) {
    std::map<ChannelId, double> load;
    for (std::size_t i = 0; i < ph.flows.size(); ++i) {
      const Flow& f = ph.flows[i];
      const NodeId s = endpoints_[f.src], d = endpoints_[f.dst];
      std::vector<Path> paths;
      if (f.exit != Port::kNone && t_.has_ports()) {
        try {
          paths = pinned_routes(t_, s, f.exit, d);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNotConstructible) throw;
        }
      }
      if (paths.empty()) paths = router_.candidate_paths(s, d, 4096);
      std::size_t best = 0;
      double best_load = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < paths.size(); ++k) {
        double worst = 0.0;
        for (const Hop& h : paths[k].hops) {
          auto it = load.find(h.channel);
          const double l = (it == load.end() ? 0.0 : it->second) /
                           t_.link(channel_link(h.channel)).capacity_gbps;
          worst = std::max(worst, l);
        }
        if (worst < best_load) {
          best_load = worst;
          best = k;
        }
      }
      for (const Hop& h : paths[best].hops) {
        load[h.channel] += f.bytes;
        demand[i].channels.push_back({dense(h.channel), 1.0});
      }
    }
  }

  const Topology& t_;
  const std::vector<NodeId>& endpoints_;
  SimOptions opt_;
  Router router_;
  double scale_ = 1.0;
  std::vector<int> dense_;
  std::vector<ChannelId> touched_;
  std::vector<double> capacity_;
};

using PhaseKey = std::vector<std::tuple<int, int, double, int>>;

PhaseKey key_of(const Phase& ph) {
  PhaseKey k;
  k.reserve(ph.flows.size());
  for (const Flow& f : ph.flows) k.emplace_back(f.src, f.dst, f.bytes, static_cast<int>(f.exit));
  return k;
}

}  // namespace

BandwidthReport simulate_flows(const Topology& t, const std::vector<NodeId>& endpoints,
                               const TrafficPattern& pattern, const SimOptions& opt) {
  validate_pattern(pattern);
  require(opt.alpha_s >= 0.0, "alpha must be non-negative");
  require(static_cast<int>(endpoints.size()) >= pattern.participants,
          "pattern has " + std::to_string(pattern.participants) + " ranks but only " +
              std::to_string(endpoints.size()) + " endpoints are mapped");
  for (NodeId n : endpoints) {
    require(n >= 0 && n < t.accelerator_count(), "endpoint is not an accelerator");
  }
  const std::vector<NodeId> ranks(endpoints.begin(), endpoints.begin() + pattern.participants);
  FlowEngine engine(t, ranks, opt);

  BandwidthReport rep;
  const int p = pattern.participants;
  rep.injection_gbps = engine.injection_gbps();
  std::vector<double> recv_bytes(p, 0.0), recv_time(p, 0.0);
  std::map<PhaseKey, PhaseOutcome> memo;
  for (const Phase& ph : pattern.phases) {
    PhaseKey key = key_of(ph);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(std::move(key), engine.run(ph)).first;
    const PhaseOutcome& o = it->second;
    PhaseResult r;
    r.label = ph.label;
    r.repeat = ph.repeat;
    r.comm_s = ph.flows.empty() ? 0.0 : o.comm_s + opt.alpha_s;
    r.time_s = ph.overlap ? std::max(ph.compute_s, r.comm_s) : ph.compute_s + r.comm_s;
    r.max_link_load = o.max_link_load;
    rep.max_link_load = std::max(rep.max_link_load, o.max_link_load);
    rep.total_s += r.time_s * ph.repeat;
    std::vector<double> last(p, 0.0);
    for (std::size_t i = 0; i < ph.flows.size(); ++i) {
      const Flow& f = ph.flows[i];
      recv_bytes[f.dst] += f.bytes * ph.repeat;
      last[f.dst] = std::max(last[f.dst], o.finish[i] + opt.alpha_s);
    }
    for (int k = 0; k < p; ++k) recv_time[k] += last[k] * ph.repeat;
    rep.phases.push_back(std::move(r));
  }
  rep.rank_gbps.assign(p, 0.0);
  for (int k = 0; k < p; ++k) {
    if (recv_time[k] > 0.0) rep.rank_gbps[k] = recv_bytes[k] * 8.0 / recv_time[k] / 1e9;
  }
  rep.bytes_per_rank = std::accumulate(recv_bytes.begin(), recv_bytes.end(), 0.0) / p;
  if (rep.total_s > 0.0) {
    rep.share_of_injection = rep.bytes_per_rank * 8.0 / rep.total_s / 1e9 / rep.injection_gbps;
  }
  return rep;
}

nlohmann::json BandwidthReport::to_json() const {
  nlohmann::json phases_j = nlohmann::json::array();
  for (const PhaseResult& r : phases) {
    phases_j.push_back({{"label", r.label},
                        {"repeat", r.repeat},
                        {"comm_s", r.comm_s},
                        {"time_s", r.time_s},
                        {"max_link_load", r.max_link_load}});
  }
  double lo = 0.0, hi = 0.0, mean = 0.0;
  if (!rank_gbps.empty()) {
    lo = *std::min_element(rank_gbps.begin(), rank_gbps.end());
    hi = *std::max_element(rank_gbps.begin(), rank_gbps.end());
    mean = std::accumulate(rank_gbps.begin(), rank_gbps.end(), 0.0) / rank_gbps.size();
  }
  return {{"total_s", total_s},
          {"injection_gbps", injection_gbps},
          {"bytes_per_rank", bytes_per_rank},
          {"share_of_injection", share_of_injection},
          {"max_link_load", max_link_load},
          {"rank_gbps", {{"min", lo}, {"mean", mean}, {"max", hi}}},
          {"phases", phases_j}};
}

std::string BandwidthReport::to_csv() const {
  std::ostringstream os;
  os << "endpoint,gbps\n";
  for (std::size_t i = 0; i < rank_gbps.size(); ++i) os << i << ',' << rank_gbps[i] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

JobGrid whole_machine_grid(const Topology& t) {
  JobGrid g;
  const auto& l = t.layout();
  if (l.grid_width > 0 && l.grid_height > 0) {
    g.rows = l.grid_height;
    g.cols = l.grid_width;
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) g.nodes.push_back(t.accelerator_at(c, r));
    }
    return g;
  }
  const int n = t.accelerator_count();
  int rows = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (rows > 1 && n % rows != 0) --rows;
  g.rows = rows;
  g.cols = n / rows;
  for (NodeId i = 0; i < n; ++i) g.nodes.push_back(i);
  return g;
}

TrafficPattern collective_pattern(const Topology& t, const JobGrid& job,
                                  const CollectiveSpec& spec, bool* embedded) {
  require(spec.p >= 2 && spec.bytes > 0.0, "collective pattern needs two ranks and a payload");
  if (embedded) *embedded = true;
  switch (spec.kind) {
    case CollectiveKind::kTree: return tree_pattern(spec.p, spec.bytes);
    case CollectiveKind::kTorus2d:
      require(job.rows == job.cols, "torus2d needs a square job grid, got " +
                                        std::to_string(job.rows) + "x" +
                                        std::to_string(job.cols));
      return torus2d_pattern(job.rows, spec.bytes);
    default: break;
  }
  const RingEmbedding e = embed_rings(t, job);
  const PatternKind pk = spec.kind == CollectiveKind::kRing        ? PatternKind::kRingAllreduce
                         : spec.kind == CollectiveKind::kBidirRing ? PatternKind::kBidirRingAllreduce
                                                                   : PatternKind::kTwoRingsAllreduce;
  if (embedded && spec.kind == CollectiveKind::kTwoRings && !e.two_rings) *embedded = false;
  return ring_pattern(pk, e, spec.p, spec.bytes);
}

CollectiveResult simulate_collective(const Topology& t, const JobGrid& job,
                                     const CollectiveSpec& spec, const SimOptions& opt) {
  require(job.rows * job.cols == static_cast<int>(job.nodes.size()),
          "job grid size does not match its node list");
  require(spec.p == static_cast<int>(job.nodes.size()),
          "collective participants do not match the job size");
  require(spec.bytes >= 0.0, "message size must be non-negative");
  CollectiveResult res;
  res.kind = spec.kind;
  if (spec.p == 1 || spec.bytes == 0.0) {
    return res;
  }
  const TrafficPattern tp = collective_pattern(t, job, spec, &res.embedded);
  res.report = simulate_flows(t, job.nodes, tp, opt);
  res.time_s = res.report.total_s;
  if (res.time_s > 0.0) {
    res.share_of_peak =
        2.0 * spec.bytes * 8.0 / (res.time_s * res.report.injection_gbps * 1e9);
  }
  return res;
}

}  // namespace hxmesh
