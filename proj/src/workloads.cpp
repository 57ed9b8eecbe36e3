#include "hxmesh/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <variant>

#include "hxmesh/allocation.hpp"
#include "hxmesh/error.hpp"

namespace hxmesh {

using nlohmann::json;

void WorkloadConfig::validate() const {
  require(D >= 1 && P >= 1 && O >= 1, "parallelism degrees must be at least 1");
  require(M >= 1.0, "minibatch must hold at least one example");
  require(W >= 1.0, "word size must be at least one byte");
  require(n_params >= 1.0, "parameter count must be at least 1");
  require(n_act >= 0.0 && n_op >= 0.0, "activation and operator volumes must be non-negative");
}

CommVolumes comm_volumes(const WorkloadConfig& w) {
  w.validate();
  CommVolumes v;
  v.v_d = w.W * w.n_params / (static_cast<double>(w.O) * w.P);
  v.v_p = w.M * w.W * w.n_act / (static_cast<double>(w.D) * w.P * w.O);
  v.v_o = w.W * w.n_op;
  return v;
}

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::kAllreduce: return "allreduce";
    case OpKind::kAlltoall: return "alltoall";
    case OpKind::kAllgather: return "allgather";
    case OpKind::kReduceScatter: return "reducescatter";
    case OpKind::kSendRecv: return "sendrecv";
  }
  return "?";
}

OpKind op_kind_from_string(const std::string& s) {
  for (OpKind k : {OpKind::kAllreduce, OpKind::kAlltoall, OpKind::kAllgather,
                   OpKind::kReduceScatter, OpKind::kSendRecv}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::kParse, "unknown communication op '" + s + "'");
}

double PhaseTrace::compute_s() const {
  double c = 0.0;
  for (const TracePhase& p : phases) c += p.compute_s * p.repeat;
  return c;
}

void PhaseTrace::validate() const {
  require(job_rows >= 1 && job_cols >= 1, "job grid must be non-empty");
  const int n = job_rows * job_cols;
  for (const TracePhase& ph : phases) {
    require(ph.repeat >= 1, "phase '" + ph.label + "' needs a positive repeat");
    require(ph.compute_s >= 0.0, "phase '" + ph.label + "' has negative compute");
    for (const CommOp& op : ph.ops) {
      require(op.bytes >= 0.0, "op '" + op.label + "' has negative size");
      require(!op.background || op.kind == OpKind::kSendRecv,
              "only send/recv ops can stream in the background");
      for (const RankGroup& g : op.groups) {
        if (op.kind == OpKind::kSendRecv) {
          require(g.ranks.size() == 2 && g.ranks[0] != g.ranks[1],
                  "send/recv groups are distinct {src, dst} pairs");
        } else {
          require(g.rows >= 1 && g.rows * g.cols == static_cast<int>(g.ranks.size()),
                  "group shape does not match its ranks in op '" + op.label + "'");
        }
        std::set<int> seen;
        for (int r : g.ranks) {
          require(r >= 0 && r < n, "rank " + std::to_string(r) + " is outside the job");
          require(seen.insert(r).second, "rank listed twice in op '" + op.label + "'");
        }
      }
    }
  }
}

json PhaseTrace::to_json() const {
  json ph = json::array();
  for (const TracePhase& p : phases) {
    json ops = json::array();
    for (const CommOp& op : p.ops) {
      json groups = json::array();
      for (const RankGroup& g : op.groups) {
        groups.push_back({{"rows", g.rows}, {"cols", g.cols}, {"ranks", g.ranks}});
      }
      ops.push_back({{"kind", to_string(op.kind)},
                     {"bytes", op.bytes},
                     {"background", op.background},
                     {"label", op.label},
                     {"groups", groups}});
    }
    ph.push_back({{"label", p.label},
                  {"compute_s", p.compute_s},
                  {"overlap", p.overlap},
                  {"repeat", p.repeat},
                  {"ops", ops}});
  }
  return {{"name", name},
          {"config",
           {{"D", config.D},
            {"P", config.P},
            {"O", config.O},
            {"M", config.M},
            {"n_params", config.n_params},
            {"n_act", config.n_act},
            {"n_op", config.n_op},
            {"W", config.W}}},
          {"job", {{"rows", job_rows}, {"cols", job_cols}}},
          {"phases", ph}};
}

PhaseTrace PhaseTrace::from_json(const json& j) {
  PhaseTrace t;
  try {
    t.name = j.value("name", "");
    const json& c = j.at("config");
    t.config.D = c.at("D");
    t.config.P = c.at("P");
    t.config.O = c.at("O");
    t.config.M = c.at("M");
    t.config.n_params = c.at("n_params");
    t.config.n_act = c.value("n_act", 0.0);
    t.config.n_op = c.value("n_op", 0.0);
    t.config.W = c.value("W", 4.0);
    t.job_rows = j.at("job").at("rows");
    t.job_cols = j.at("job").at("cols");
    for (const json& p : j.at("phases")) {
      TracePhase ph;
      ph.label = p.value("label", "");
      ph.compute_s = p.value("compute_s", 0.0);
      ph.overlap = p.value("overlap", false);
      ph.repeat = p.value("repeat", 1);
      for (const json& o : p.value("ops", json::array())) {
        CommOp op;
        op.kind = op_kind_from_string(o.at("kind"));
        op.bytes = o.at("bytes");
        op.background = o.value("background", false);
        op.label = o.value("label", "");
        for (const json& g : o.at("groups")) {
          RankGroup rg;
          rg.ranks = g.at("ranks").get<std::vector<int>>();
          rg.rows = g.value("rows", 1);
          rg.cols = g.value("cols", static_cast<int>(rg.ranks.size()));
          op.groups.push_back(std::move(rg));
        }
        ph.ops.push_back(std::move(op));
      }
      t.phases.push_back(std::move(ph));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad trace: ") + e.what());
  }
  t.config.validate();
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kOverrideKeys = {"D", "P", "O", "M", "examples",
                                             "microbatches_in_flight", "halo_depth",
                                             "allreduce_groups"};

int get_int(const json& o, const char* key, int def) {
  if (!o.contains(key)) return def;
  const json& v = o.at(key);
  require(v.is_number_integer() && v.get<int>() >= 1,
          std::string("override '") + key + "' must be a positive integer");
  return v.get<int>();
}

// Most square rows x cols holding n ranks, cols a multiple of `align`.
std::pair<int, int> job_shape(int n, int align) {
  int best = 0;
  for (int r = 1; static_cast<long long>(r) * r <= n; ++r) {
    if (n % r == 0 && (n / r) % align == 0) best = r;
  }
  if (best == 0) return {1, n};
  return {best, n / best};
}

// O-wide row segments in snake order; segment s holds ranks of stage s.
std::vector<std::vector<int>> segments(int rows, int cols, int width) {
  std::vector<std::vector<int>> out;
  const int per_row = cols / width;
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < per_row; ++j) {
      const int seg = r % 2 ? per_row - 1 - j : j;
      std::vector<int> ranks;
      for (int k = 0; k < width; ++k) ranks.push_back(r * cols + seg * width + k);
      out.push_back(std::move(ranks));
    }
  }
  return out;
}

RankGroup row_group(std::vector<int> ranks) {
  RankGroup g;
  g.rows = 1;
  g.cols = static_cast<int>(ranks.size());
  g.ranks = std::move(ranks);
  return g;
}

RankGroup pair(int src, int dst) { return RankGroup{1, 2, {src, dst}}; }

PhaseTrace resnet(const json& o) {
  PhaseTrace t;
  t.name = "resnet152";
  auto& w = t.config;
  w.D = get_int(o, "D", 1024);
  w.M = get_int(o, "M", 32768);
  w.n_params = 60.2e6;
  w.W = 4;
  const int groups = get_int(o, "allreduce_groups", 10);
  std::tie(t.job_rows, t.job_cols) = job_shape(w.D, 1);
  RankGroup all;
  all.rows = t.job_rows;
  all.cols = t.job_cols;
  for (int r = 0; r < w.D; ++r) all.ranks.push_back(r);
  const double chunk = comm_volumes(w).v_d / groups;
  const double fwd = 36e-3, bwd = 72e-3;
  t.phases.push_back({"forward", fwd, false, 1, {}});
  t.phases.push_back({"backward", bwd / groups, true, 1, {}});
  CommOp ar{OpKind::kAllreduce, {all}, chunk, false, "gradient group"};
  if (groups > 1) t.phases.push_back({"backward", bwd / groups, true, groups - 1, {ar}});
  t.phases.push_back({"drain", 0.0, false, 1, {ar}});
  return t;
}

PhaseTrace cosmoflow(const json& o) {
  PhaseTrace t;
  t.name = "cosmoflow";
  auto& w = t.config;
  w.D = get_int(o, "D", 256);
  w.O = get_int(o, "O", 4);
  w.M = get_int(o, "M", 8192);
  w.n_params = 8.9e6;
  w.W = 4;
  const int halo = get_int(o, "halo_depth", 1);
  std::tie(t.job_rows, t.job_cols) = job_shape(w.D * w.O, w.O);
  const auto segs = segments(t.job_rows, t.job_cols, w.O);

  std::vector<RankGroup> ogroups;
  for (const auto& s : segs) ogroups.push_back(row_group(s));
  std::vector<RankGroup> dgroups;
  for (int k = 0; k < w.O; ++k) {
    RankGroup g;
    g.rows = t.job_rows;
    g.cols = t.job_cols / w.O;
    for (int r = 0; r < t.job_rows; ++r) {
      for (int c = k; c < t.job_cols; c += w.O) g.ranks.push_back(r * t.job_cols + c);
    }
    dgroups.push_back(std::move(g));
  }
  std::vector<RankGroup> neighbours;
  for (const auto& s : segs) {
    for (int k = 0; k + 1 < w.O; ++k) {
      neighbours.push_back(pair(s[k], s[k + 1]));
      neighbours.push_back(pair(s[k + 1], s[k]));
    }
  }

  // Halo estimate: slabs of the 128^3 volume, spatial side halving per layer.
  const int layers = 7;
  const int channels[layers] = {4, 16, 32, 64, 128, 256, 256};
  const double local = w.M / w.D;
  auto halo_bytes = [&](int l) {
    const double side = 128.0 / (1 << l);
    return side * side * channels[l] * w.W * halo * local;
  };
  const double fc_in = 256.0 * w.W * local;
  const double fwd = 44.3e-3 / 3.0, bwd = 2.0 * fwd;
  const double chunk = comm_volumes(w).v_d / (layers + 1);
  CommOp grad{OpKind::kAllreduce, dgroups, chunk, false, "gradient chunk"};

  for (int l = 0; l < layers; ++l) {
    TracePhase ph{"conv " + std::to_string(l) + " forward", 0.9 * fwd / layers, true, 1, {}};
    if (w.O > 1) ph.ops.push_back({OpKind::kSendRecv, neighbours, halo_bytes(l), false, "halo"});
    t.phases.push_back(std::move(ph));
  }
  TracePhase fc{"fc forward", 0.1 * fwd, false, 1, {}};
  if (w.O > 1) fc.ops.push_back({OpKind::kAllgather, ogroups, fc_in, false, "fc input"});
  t.phases.push_back(std::move(fc));
  TracePhase fcb{"fc backward", 0.1 * bwd, false, 1, {}};
  if (w.O > 1) fcb.ops.push_back({OpKind::kReduceScatter, ogroups, fc_in, false, "fc error"});
  t.phases.push_back(std::move(fcb));
  for (int l = layers - 1; l >= 0; --l) {
    TracePhase ph{"conv " + std::to_string(l) + " backward", 0.9 * bwd / layers, true, 1, {}};
    if (w.O > 1) ph.ops.push_back({OpKind::kSendRecv, neighbours, halo_bytes(l), false, "halo"});
    if (w.D > 1) ph.ops.push_back(grad);
    t.phases.push_back(std::move(ph));
  }
  if (w.D > 1) t.phases.push_back({"drain", 0.0, false, 1, {grad}});
  return t;
}

PhaseTrace dlrm(const json& o) {
  PhaseTrace t;
  t.name = "dlrm";
  auto& w = t.config;
  w.D = get_int(o, "D", 128);
  w.M = get_int(o, "M", 8192);
  w.n_params = 2.96e6 / 4.0;  // data-parallel MLP
  w.W = 4;
  std::tie(t.job_rows, t.job_cols) = job_shape(w.D, 1);
  std::vector<int> ranks(w.D);
  for (int r = 0; r < w.D; ++r) ranks[r] = r;
  RankGroup all{t.job_rows, t.job_cols, ranks};
  const double a2a = 1e6;
  const double emb = 95e-6, inter = 209e-6, mlp = 796e-6;
  t.phases = {
      {"embedding forward", emb, false, 1, {}},
      {"lookup exchange", 0.0, false, 1, {{OpKind::kAlltoall, {all}, a2a, false, "embeddings"}}},
      {"interaction forward", inter, false, 1, {}},
      {"mlp forward", mlp, false, 1, {}},
      {"mlp backward", mlp, false, 1, {}},
      {"interaction backward", inter, false, 1, {}},
      {"gradient exchange", 0.0, false, 1, {{OpKind::kAlltoall, {all}, a2a, false, "embedding grads"}}},
      {"embedding backward", emb, false, 1, {}},
      {"mlp allreduce", 0.0, false, 1,
       {{OpKind::kAllreduce, {all}, comm_volumes(w).v_d, false, "mlp gradients"}}},
  };
  return t;
}

PhaseTrace gpt3(const json& o, bool moe) {
  PhaseTrace t;
  t.name = moe ? "gpt3_moe" : "gpt3";
  auto& w = t.config;
  w.D = get_int(o, "D", 1);
  w.P = get_int(o, "P", 96);
  w.O = get_int(o, "O", 4);
  const int examples = get_int(o, "examples", 1);
  const int in_flight = std::min(get_int(o, "microbatches_in_flight", w.P), w.P);
  w.M = static_cast<double>(examples) * w.D * w.P;
  w.n_act = 2048.0 * 12288.0;
  w.n_params = 96 * 1.82e9;
  w.W = 4;
  const int experts = 16;
  require(!moe || experts % w.O == 0, "expert groups need O to divide 16");
  require(!moe || w.P % (experts / w.O) == 0, "pipeline depth must tile the expert groups");
  std::tie(t.job_rows, t.job_cols) = job_shape(w.accelerators(), w.O);
  const auto segs = segments(t.job_rows, t.job_cols, w.O);
  auto stage = [&](int d, int p) -> const std::vector<int>& { return segs[d * w.P + p]; };

  // Active stages hold a microbatch; the rest of the pipeline idles.
  std::vector<RankGroup> ogroups, experts_g;
  std::vector<RankGroup> fwd_p2p, bwd_p2p;
  for (int d = 0; d < w.D; ++d) {
    for (int p = 0; p < in_flight; ++p) {
      ogroups.push_back(row_group(stage(d, p)));
      if (p + 1 < in_flight) {
        for (int k = 0; k < w.O; ++k) {
          fwd_p2p.push_back(pair(stage(d, p)[k], stage(d, p + 1)[k]));
          bwd_p2p.push_back(pair(stage(d, p + 1)[k], stage(d, p)[k]));
        }
      }
    }
    const int span = experts / w.O;
    for (int p = 0; moe && p + span <= in_flight; p += span) {
      std::vector<int> r;
      for (int q = p; q < p + span; ++q) r.insert(r.end(), stage(d, q).begin(), stage(d, q).end());
      experts_g.push_back(row_group(std::move(r)));
    }
  }

  const double act = w.W * w.n_act * examples;  // layer input/output
  const double share = act / w.O;
  const int instances = moe ? 6 : 4;
  const double compute = (moe ? 49.9e-3 : 31.8e-3) / instances;
  auto p2p = [&](bool forward, int per_pass) {
    return CommOp{OpKind::kSendRecv, forward ? fwd_p2p : bwd_p2p, share / per_pass, true,
                  forward ? "activations" : "errors"};
  };
  const CommOp mega{OpKind::kAllreduce, ogroups, act, false, "operator allreduce"};
  for (bool forward : {true, false}) {
    const std::string pass = forward ? " forward" : " backward";
    if (!moe) {
      t.phases.push_back({"ff+mha" + pass, compute, false, 2, {mega, p2p(forward, 2)}});
      continue;
    }
    t.phases.push_back({"mha" + pass, compute, false, 1, {mega, p2p(forward, 3)}});
    if (!experts_g.empty()) {
      const CommOp a2a{OpKind::kAlltoall, experts_g, share, false, "expert exchange"};
      t.phases.push_back({"experts" + pass, compute, false, 2, {a2a, p2p(forward, 3)}});
    } else {
      t.phases.push_back({"experts" + pass, compute, false, 2, {p2p(forward, 3)}});
    }
  }
  if (w.D > 1) {
    std::vector<RankGroup> dgroups;
    for (int p = 0; p < w.P; ++p) {
      for (int k = 0; k < w.O; ++k) {
        std::vector<int> r;
        for (int d = 0; d < w.D; ++d) r.push_back(stage(d, p)[k]);
        dgroups.push_back(row_group(std::move(r)));
      }
    }
    t.phases.push_back(
        {"drain", 0.0, false, 1,
         {{OpKind::kAllreduce, dgroups, comm_volumes(w).v_d, false, "weight gradients"}}});
  }
  return t;
}

}  // namespace

const std::vector<std::string>& dnn_presets() {
  static const std::vector<std::string> names = {"resnet152", "cosmoflow", "dlrm", "gpt3",
                                                 "gpt3_moe"};
  return names;
}

PhaseTrace build_dnn_trace(const std::string& preset, const json& overrides) {
  const json o = overrides.is_null() ? json::object() : overrides;
  require(o.is_object(), "overrides must be a JSON object");
  for (const auto& [k, v] : o.items()) {
    require(kOverrideKeys.count(k) > 0, "unknown override '" + k + "'");
  }
  PhaseTrace t;
  if (preset == "resnet152") t = resnet(o);
  else if (preset == "cosmoflow") t = cosmoflow(o);
  else if (preset == "dlrm") t = dlrm(o);
  else if (preset == "gpt3") t = gpt3(o, false);
  else if (preset == "gpt3_moe") t = gpt3(o, true);
  else fail(ErrorCode::kInvalidArgument, "unknown workload preset '" + preset + "'");
  t.config.validate();
  t.validate();
  return t;
}

JobGrid place_job(const Topology& t, int rows, int cols) {
  require(rows >= 1 && cols >= 1, "job grid must be non-empty");
  const auto& l = t.layout();
  if (t.is_hxmesh()) {
    require(rows % l.board_b == 0 && cols % l.board_a == 0,
            "job " + std::to_string(rows) + "x" + std::to_string(cols) +
                " is not a whole number of " + std::to_string(l.board_a) + "x" +
                std::to_string(l.board_b) + " boards");
    ClusterState state(std::get<HxMeshParams>(t.spec().params));
    const auto a = greedy_allocate(state, {0, rows / l.board_b, cols / l.board_a});
    if (!a) fail(ErrorCode::kInfeasible, "job does not fit the machine");
    return job_grid(t, *a);
  }
  JobGrid g;
  g.rows = rows;
  g.cols = cols;
  if (l.grid_width > 0) {
    if (rows > l.grid_height || cols > l.grid_width) {
      fail(ErrorCode::kInfeasible, "job does not fit the machine");
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) g.nodes.push_back(t.accelerator_at(c, r));
    }
    return g;
  }
  if (static_cast<long long>(rows) * cols > t.accelerator_count()) {
    fail(ErrorCode::kInfeasible, "job does not fit the machine");
  }
  for (int i = 0; i < rows * cols; ++i) g.nodes.push_back(i);
  return g;
}

// ---------------------------------------------------------------------------

namespace {

bool is_collective(OpKind k) {
  return k == OpKind::kAllreduce || k == OpKind::kAllgather || k == OpKind::kReduceScatter;
}

// Phase-wise union of identically shaped per-group schedules.
void merge_into(std::vector<Phase>& out, const TrafficPattern& tp, const std::vector<int>& map) {
  if (out.empty()) {
    for (const Phase& ph : tp.phases) out.push_back({{}, ph.repeat, 0.0, false, ph.label});
  }
  require(out.size() == tp.phases.size(), "concurrent groups need matching schedules");
  for (std::size_t i = 0; i < tp.phases.size(); ++i) {
    require(out[i].repeat == tp.phases[i].repeat, "concurrent groups need matching schedules");
    for (Flow f : tp.phases[i].flows) {
      f.src = map[f.src];
      f.dst = map[f.dst];
      out[i].flows.push_back(f);
    }
  }
}

std::vector<Phase> op_schedule(const Topology& t, const JobGrid& job, const CommOp& op,
                               CollectiveKind kind) {
  std::vector<Phase> out;
  for (const RankGroup& g : op.groups) {
    const int n = static_cast<int>(g.ranks.size());
    if (n < 2 || op.bytes <= 0.0) continue;
    if (op.kind == OpKind::kSendRecv) {
      if (out.empty()) out.push_back({{}, 1, 0.0, false, op.label});
      out[0].flows.push_back({g.ranks[0], g.ranks[1], op.bytes});
      continue;
    }
    TrafficPattern tp;
    if (op.kind == OpKind::kAlltoall) {
      tp = make_pattern(PatternKind::kAlltoall, {n, op.bytes / n});
    } else {
      JobGrid sub;
      sub.rows = g.rows;
      sub.cols = g.cols;
      for (int r : g.ranks) sub.nodes.push_back(job.nodes[r]);
      tp = collective_pattern(t, sub, {kind, n, op.bytes});
      if (op.kind != OpKind::kAllreduce) {
        // Ring schedules: reduce-scatter first, allgather second.
        tp.phases = {tp.phases[op.kind == OpKind::kReduceScatter ? 0 : 1]};
      }
    }
    merge_into(out, tp, g.ranks);
  }
  return out;
}

bool kind_applies(const TracePhase& ph, CollectiveKind k) {
  for (const CommOp& op : ph.ops) {
    if (!is_collective(op.kind)) continue;
    for (const RankGroup& g : op.groups) {
      if (g.ranks.size() < 2) continue;
      if (k == CollectiveKind::kTorus2d &&
          (op.kind != OpKind::kAllreduce || g.rows != g.cols || g.rows < 2)) {
        return false;
      }
    }
  }
  return true;
}

double phase_comm(const Topology& t, const JobGrid& job, const TracePhase& ph,
                  CollectiveKind kind, const SimOptions& opt) {
  std::vector<Phase> fg;
  std::vector<Flow> bg;
  for (const CommOp& op : ph.ops) {
    auto s = op_schedule(t, job, op, kind);
    if (op.background) {
      for (const Phase& p : s) bg.insert(bg.end(), p.flows.begin(), p.flows.end());
    } else {
      fg.insert(fg.end(), s.begin(), s.end());
    }
  }
  TrafficPattern tp;
  tp.kind = "phase";
  tp.participants = static_cast<int>(job.nodes.size());
  if (fg.empty()) {
    if (bg.empty()) return 0.0;
    tp.phases.push_back({bg, 1, 0.0, false, "background"});
  } else {
    long long rounds = 0;
    for (const Phase& p : fg) rounds += p.repeat;
    for (Phase& p : fg) {
      for (Flow f : bg) {
        f.bytes /= static_cast<double>(rounds);
        p.flows.push_back(f);
      }
    }
    tp.phases = std::move(fg);
  }
  return simulate_flows(t, job.nodes, tp, opt).total_s;
}

}  // namespace

IterationResult iteration_time(const PhaseTrace& trace, const Topology& t, const JobGrid& job,
                               const CostParams& cp) {
  trace.validate();
  cp.validate();
  require(static_cast<int>(job.nodes.size()) == trace.job_rows * trace.job_cols,
          "trace needs " + std::to_string(trace.job_rows * trace.job_cols) +
              " ranks but the job holds " + std::to_string(job.nodes.size()));
  SimOptions opt;
  opt.alpha_s = cp.alpha_s;
  IterationResult res;
  for (const TracePhase& ph : trace.phases) {
    PhaseTiming pt;
    pt.label = ph.label;
    pt.repeat = ph.repeat;
    pt.compute_s = ph.compute_s;
    const bool collective = std::any_of(ph.ops.begin(), ph.ops.end(),
                                        [](const CommOp& op) { return is_collective(op.kind); });
    if (collective) {
      pt.comm_s = std::numeric_limits<double>::infinity();
      for (CollectiveKind k : {CollectiveKind::kTwoRings, CollectiveKind::kTorus2d,
                               CollectiveKind::kBidirRing, CollectiveKind::kRing}) {
        if (!kind_applies(ph, k)) continue;
        const double c = phase_comm(t, job, ph, k, opt);
        if (c < pt.comm_s) {
          pt.comm_s = c;
          pt.algorithm = to_string(k);
        }
      }
    } else {
      pt.comm_s = phase_comm(t, job, ph, CollectiveKind::kRing, opt);
    }
    pt.time_s = ph.overlap ? std::max(ph.compute_s, pt.comm_s) : ph.compute_s + pt.comm_s;
    res.total_s += pt.time_s * ph.repeat;
    res.compute_s += ph.compute_s * ph.repeat;
    res.phases.push_back(std::move(pt));
  }
  if (res.compute_s > 0.0) res.overhead = (res.total_s - res.compute_s) / res.compute_s;
  return res;
}

json IterationResult::to_json() const {
  json ph = json::array();
  for (const PhaseTiming& p : phases) {
    ph.push_back({{"label", p.label},
                  {"repeat", p.repeat},
                  {"compute_s", p.compute_s},
                  {"comm_s", p.comm_s},
                  {"time_s", p.time_s},
                  {"algorithm", p.algorithm}});
  }
  return {{"total_s", total_s}, {"compute_s", compute_s}, {"overhead", overhead}, {"phases", ph}};
}

double cost_savings(double other_cost, double other_time, double hx_cost, double hx_time) {
  require(other_cost > 0.0 && other_time > 0.0 && hx_cost > 0.0 && hx_time > 0.0,
          "costs and runtimes must be positive");
  return (other_cost / hx_cost) * (other_time / hx_time);
}

}  // namespace hxmesh
