#include "hxmesh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "hxmesh/allocation.hpp"
#include "hxmesh/collectives.hpp"
#include "hxmesh/error.hpp"
#include "hxmesh/metrics.hpp"
#include "hxmesh/routing.hpp"
#include "hxmesh/simulator.hpp"
#include "hxmesh/topology_io.hpp"
#include "hxmesh/workloads.hpp"

namespace hxmesh {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  if (!fs::exists(path)) fail(ErrorCode::kFileNotFound, "no such file: " + path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// Writes to stdout, or atomically to <dir>/<name> when a directory is set.
class Sink {
 public:
  Sink(std::ostream& out, std::string dir) : out_(out), dir_(std::move(dir)) {}

  void emit(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
      return;
    }
    fs::create_directories(dir_);
    const fs::path target = fs::path(dir_) / name;
    const fs::path tmp = fs::path(dir_) / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) fail(ErrorCode::kFileNotFound, "cannot write " + tmp.string());
      f << content;
    }
    fs::rename(tmp, target);
    out_ << target.string() << '\n';
  }

 private:
  std::ostream& out_;
  std::string dir_;
};

void set_planes(TopologySpec& spec, int planes) {
  if (planes <= 0) return;
  std::visit([&](auto& p) {
    if constexpr (requires { p.planes; }) p.planes = planes;
  }, spec.params);
}

PriceTable load_prices(const std::string& path) {
  return path.empty() ? PriceTable{} : PriceTable::from_json(read_json(path));
}

std::vector<SizeClass> sizes_of(const std::string& s) {
  if (s == "small") return {SizeClass::kSmall};
  if (s == "large") return {SizeClass::kLarge};
  if (s == "all") return {SizeClass::kSmall, SizeClass::kLarge};
  fail(ErrorCode::kParse, "size must be small, large or all");
}

// --------------------------------------------------------------------------

json topology_stats(const Topology& t, const PriceTable& prices) {
  const EquipmentCount e = count_equipment(t);
  long long switches = 0;
  for (const Node& n : t.nodes()) switches += n.kind != NodeKind::kAccelerator;
  return {{"name", t.spec().name},
          {"family", to_string(t.family())},
          {"planes", t.planes()},
          {"accelerators", t.accelerator_count()},
          {"routers", switches},
          {"links", t.link_count()},
          {"equipment",
           {{"switches", e.switches}, {"dac", e.dac}, {"aoc", e.aoc}, {"pcb", e.pcb}}},
          {"cost_usd", price(e, prices)}};
}

std::string cost_csv(const PriceTable& prices) {
  std::ostringstream os;
  os << "config,size,reading,switches,dac,aoc,cost_usd,published_musd,relative_error,pass\n";
  for (const CostReport& r : cost_suite(prices)) {
    auto row = [&](const char* reading, double usd) {
      const double rel = std::abs(usd / 1e6 - r.published_musd) / r.published_musd;
      os << r.label << ',' << to_string(r.size) << ',' << reading << ',' << r.equipment.switches
         << ',' << r.equipment.dac << ',' << r.equipment.aoc << ',' << fmt(usd, 10) << ','
         << r.published_musd << ',' << fmt(rel, 4) << ',' << (rel <= 0.02 ? "pass" : "fail")
         << '\n';
    };
    row("aoc", r.cost_usd);
    if (r.alt_cost_usd > 0.0) row("dac", r.alt_cost_usd);
  }
  return os.str();
}

std::string diameter_csv(const std::vector<SizeClass>& sizes) {
  std::ostringstream os;
  os << "config,size,bfs,analytic,published,pass\n";
  for (const ReferenceConfig& c : reference_configs()) {
    if (std::find(sizes.begin(), sizes.end(), c.size) == sizes.end()) continue;
    const Topology t = build_topology(c.spec);
    const int bfs = bfs_diameter(t);
    std::string analytic = "";
    if (c.spec.family == Family::kHxMesh || c.spec.family == Family::kHyperX) {
      analytic = std::to_string(analytic_diameter(std::get<HxMeshParams>(c.spec.params)));
    }
    const int pub = published_row(c.label, c.size).diameter;
    os << c.label << ',' << to_string(c.size) << ',' << bfs << ',' << analytic << ',' << pub
       << ',' << (bfs == pub ? "pass" : "fail") << '\n';
  }
  return os.str();
}

std::string collectives_csv(const CostParams& cp) {
  std::ostringstream os;
  os << "p,bytes,tree_s,ring_s,bidir_ring_s,two_rings_s,torus2d_s,best\n";
  for (int p : {16, 64, 256, 1024, 4096, 16384}) {
    for (double s = 1e3; s <= 1e9; s *= 10) {
      os << p << ',' << s;
      for (CollectiveKind k : {CollectiveKind::kTree, CollectiveKind::kRing,
                               CollectiveKind::kBidirRing, CollectiveKind::kTwoRings,
                               CollectiveKind::kTorus2d}) {
        os << ',' << fmt(collective_time({k, p, s}, cp));
      }
      os << ',' << to_string(select_algorithm(p, s, cp)) << '\n';
    }
  }
  return os.str();
}

TrafficPattern stride_phases(TrafficPattern tp, int stride) {
  if (stride <= 1 || tp.phases.size() <= 1) return tp;
  std::vector<Phase> kept;
  for (std::size_t i = 0; i < tp.phases.size(); i += stride) kept.push_back(tp.phases[i]);
  tp.phases = std::move(kept);
  return tp;
}

double alltoall_share(const Topology& t, double bytes, int stride) {
  const JobGrid g = whole_machine_grid(t);
  const TrafficPattern tp = stride_phases(
      make_pattern(PatternKind::kAlltoall, {static_cast<int>(g.nodes.size()), bytes}), stride);
  return simulate_flows(t, g.nodes, tp).share_of_injection;
}

struct AllocArgs {
  std::string mesh;
  int failures = 0;
  int seeds = 1;
  std::uint64_t seed = 1;
  int traces = 1;
  std::vector<std::string> heuristics{"base"};
  std::string distribution;
  bool summary = false;
};

std::string alloc_csv(const AllocArgs& a) {
  const TopologySpec spec = parse_topology_arg(a.mesh);
  if (spec.family != Family::kHxMesh && spec.family != Family::kHyperX) {
    fail(ErrorCode::kInvalidArgument, "allocation needs an HxMesh or HyperX");
  }
  const ClusterState empty(std::get<HxMeshParams>(spec.params));
  require(a.failures >= 0 && a.failures <= empty.board_count(), "failure count out of range");
  require(a.seeds >= 1 && a.traces >= 1, "seeds and traces must be positive");
  std::ostringstream os;
  if (a.summary) {
    os << "heuristics,failures,traces,mean,median,p1,min\n";
  } else {
    os << "heuristics,failures,seed,trace,utilization\n";
  }
  for (const std::string& hs : a.heuristics) {
    std::string list = hs;
    std::replace(list.begin(), list.end(), '+', ',');
    const Heuristics h = heuristics_from_string(list);
    std::string name = to_string(h);
    std::replace(name.begin(), name.end(), ',', '+');
    std::vector<double> all;
    for (int s = 0; s < a.seeds; ++s) {
      const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(s);
      const ClusterState st = inject_failures(empty, a.failures, seed);
      const int working = st.board_count() - st.failed_count();
      const SizeDistribution d = a.distribution.empty()
                                     ? synthetic_distribution(working)
                                     : distribution_from_csv(read_file(a.distribution));
      const auto traces = sample_job_mixes(d, working, a.traces, seed);
      const UtilizationStats u = run_allocation_experiment(traces, st, h);
      for (std::size_t i = 0; i < u.per_trace.size(); ++i) {
        all.push_back(u.per_trace[i]);
        if (!a.summary) {
          os << name << ',' << a.failures << ',' << seed << ',' << i << ','
             << fmt(u.per_trace[i]) << '\n';
        }
      }
    }
    if (a.summary) {
      const UtilizationStats u = summarize(all);
      os << name << ',' << a.failures << ',' << all.size() << ',' << fmt(u.mean) << ','
         << fmt(u.median) << ',' << fmt(u.p1) << ',' << fmt(u.min) << '\n';
    }
  }
  return os.str();
}

std::string workload_suite_csv(const std::vector<std::string>& presets, SizeClass size,
                               const json& overrides, const CostParams& cp) {
  std::ostringstream os;
  os << "preset,config,total_ms,compute_ms,overhead,cost_usd,hx2_savings,hx4_savings\n";
  for (const std::string& preset : presets) {
    const PhaseTrace tr = build_dnn_trace(preset, overrides);
    struct Row {
      std::string label;
      IterationResult r;
      double cost;
    };
    std::vector<Row> rows;
    for (const ReferenceConfig& c : reference_configs()) {
      if (c.size != size) continue;
      const Topology t = build_topology(c.spec);
      const IterationResult r =
          iteration_time(tr, t, place_job(t, tr.job_rows, tr.job_cols), cp);
      rows.push_back({c.label, r, price(count_equipment(t), PriceTable{})});
    }
    auto find = [&](const std::string& l) -> const Row& {
      for (const Row& r : rows) {
        if (r.label == l) return r;
      }
      fail(ErrorCode::kInvalidArgument, "missing " + l);
    };
    const Row& hx2 = find("hx2mesh");
    const Row& hx4 = find("hx4mesh");
    for (const Row& r : rows) {
      os << preset << ',' << r.label << ',' << fmt(r.r.total_s * 1e3) << ','
         << fmt(r.r.compute_s * 1e3) << ',' << fmt(r.r.overhead, 4) << ',' << fmt(r.cost, 10)
         << ',' << fmt(cost_savings(r.cost, r.r.total_s, hx2.cost, hx2.r.total_s), 4) << ','
         << fmt(cost_savings(r.cost, r.r.total_s, hx4.cost, hx4.r.total_s), 4) << '\n';
    }
  }
  return os.str();
}

json parse_overrides(const std::vector<std::string>& sets) {
  json o = json::object();
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, "override '" + s + "' is not key=value");
    const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    try {
      std::size_t used = 0;
      const int v = std::stoi(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      o[key] = v;
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "override '" + key + "' needs an integer value");
    }
  }
  return o;
}

int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kFileNotFound: return kExitFile;
    case ErrorCode::kParse: return kExitParse;
    default: return kExitModule;
  }
}

void report_error(std::ostream& err, const std::string& kind, const std::string& msg) {
  err << json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HammingMesh network toolkit: build, price, allocate, route and simulate."};
  app.require_subcommand(1);
  std::string out_dir;
  if (const char* env = std::getenv("HXMESH_OUT")) out_dir = env;
  app.add_option("--out", out_dir, "Output directory (default $HXMESH_OUT, else stdout)");
  std::string prices_path;
  app.add_option("--prices", prices_path, "Price table JSON {switch_usd, aoc_usd, dac_usd}");

  // topo
  std::string topo;
  int planes = 0;
  bool edges = false;
  auto* c_topo = app.add_subcommand("topo", "Build and validate a topology, print its statistics");
  c_topo->add_option("--topo", topo, "Shorthand (hx2:16x16, hyperx:32x32, ft:taper50:1050, "
                                     "df:small, torus:32x32) or JSON spec path")
      ->required();
  c_topo->add_option("--planes", planes, "Override the plane count");
  c_topo->add_flag("--edges", edges, "Also write edges.csv (link,u,v,plane,medium,...)");
  c_topo->footer("Output: topology.json {name, family, planes, accelerators, routers, links, "
                 "equipment{switches,dac,aoc,pcb}, cost_usd}");

  // cost
  std::string suite;
  auto* c_cost = app.add_subcommand("cost", "Price the reference networks or one topology");
  c_cost->add_option("--suite", suite, "table1: all sixteen reference networks");
  c_cost->add_option("--topo", topo, "Single topology instead of a suite");
  c_cost->add_option("--planes", planes, "Override the plane count");
  c_cost->footer("Output: cost.csv config,size,reading,switches,dac,aoc,cost_usd,"
                 "published_musd,relative_error,pass (tolerance 2%; torus has aoc and dac "
                 "readings)");

  // diameter
  std::string size = "small";
  auto* c_diam = app.add_subcommand("diameter", "Hop diameter by BFS and closed form");
  c_diam->add_option("--suite", suite, "table1");
  c_diam->add_option("--topo", topo, "Single topology instead of a suite");
  c_diam->add_option("--size", size, "small, large or all")->check(
      CLI::IsMember({"small", "large", "all"}));
  c_diam->footer("Output: diameter.csv config,size,bfs,analytic,published,pass");

  // alloc
  AllocArgs aa;
  auto* c_alloc = app.add_subcommand("alloc", "Allocation experiments and failure sweeps");
  c_alloc->add_option("--mesh,--topo", aa.mesh, "HxMesh shorthand, e.g. hx4:8x8")->required();
  c_alloc->add_option("--failures", aa.failures, "Failed boards injected per seed");
  c_alloc->add_option("--seeds", aa.seeds, "Number of seeds");
  c_alloc->add_option("--seed", aa.seed, "First seed (default 1)");
  c_alloc->add_option("--traces", aa.traces, "Job mixes per seed");
  c_alloc->add_option("--heuristics", aa.heuristics,
                      "Sets such as base or transpose+sort (commas also accepted); repeatable");
  c_alloc->add_option("--distribution", aa.distribution, "CSV size,probability");
  c_alloc->add_flag("--summary", aa.summary, "One summary row per heuristic set");
  c_alloc->footer("Output: utilization.csv heuristics,failures,seed,trace,utilization, or "
                  "with --summary heuristics,failures,traces,mean,median,p1,min");

  // route-check
  std::string scheme = "minimal";
  std::size_t channel_limit = 40000;
  auto* c_route = app.add_subcommand("route-check", "Deadlock and virtual-channel audit");
  c_route->add_option("--topo", topo, "Topology")->required();
  c_route->add_option("--scheme", scheme, "minimal or dimension_order")
      ->check(CLI::IsMember({"minimal", "dimension_order"}));
  c_route->add_option("--channel-limit", channel_limit, "Refuse larger dependency graphs");
  c_route->footer("Output: route_check.json {acyclic, max_vc, cdg_nodes, cdg_edges, "
                  "witness[{channel,vc}]}");

  // sim
  std::string pattern, pattern_file, split = "uniform", format = "json";
  double msg_size = 1e6, alpha = 0.0;
  std::uint64_t seed = 1;
  int stride = 1;
  auto* c_sim = app.add_subcommand("sim", "Flow-level simulation of a traffic pattern");
  c_sim->add_option("--topo", topo, "Topology")->required();
  auto* o_pat = c_sim->add_option("--pattern", pattern,
                                  "alltoall, permutation, ring, bidir_ring, two_rings, "
                                  "torus2d or tree");
  auto* o_pfile = c_sim->add_option("--pattern-file", pattern_file, "Pattern JSON");
  o_pat->excludes(o_pfile);
  c_sim->add_option("--msg-size", msg_size, "Bytes per flow (alltoall/permutation) or per "
                                            "rank (allreduce)");
  c_sim->add_option("--seed", seed, "Permutation seed");
  c_sim->add_option("--alpha", alpha, "Latency per round in seconds");
  c_sim->add_option("--split", split, "uniform or best")->check(CLI::IsMember({"uniform", "best"}));
  c_sim->add_option("--stride", stride, "Simulate every k-th alltoall shift (sampled estimate)");
  c_sim->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c_sim->footer("Output: sim.json {total_s, injection_gbps, bytes_per_rank, "
                "share_of_injection, max_link_load, rank_gbps{min,mean,max}, phases[], "
                "share_of_peak for allreduces}; csv: endpoint,gbps");

  // workload
  std::string preset, trace_file;
  std::vector<std::string> sets;
  bool emit_trace = false;
  auto* c_work = app.add_subcommand("workload", "DNN iteration time on a topology");
  c_work->add_option("--preset", preset, "resnet152, cosmoflow, dlrm, gpt3, gpt3_moe or all");
  c_work->add_option("--trace", trace_file, "Trace JSON instead of a preset");
  c_work->add_option("--topo", topo, "Topology (required unless --suite or --emit-trace)");
  c_work->add_option("--set", sets, "Override key=value (D, P, O, M, examples, "
                                    "microbatches_in_flight, halo_depth, allreduce_groups)");
  c_work->add_option("--suite", suite, "small or large: every reference network, CSV");
  c_work->add_option("--alpha", alpha, "Latency per message in seconds (default 1e-6)");
  c_work->add_flag("--emit-trace", emit_trace, "Print the trace JSON and stop");
  c_work->footer("Output: workload.json {total_s, compute_s, overhead, phases[]}; with "
                 "--suite workloads.csv preset,config,total_ms,compute_ms,overhead,cost_usd,"
                 "hx2_savings,hx4_savings (cost ratio times runtime ratio)");

  // report
  bool quick = false;
  auto* c_report = app.add_subcommand("report", "Aggregate CSVs for every experiment");
  c_report->add_flag("--quick", quick, "Sampled alltoall (stride 64) and fewer traces");
  c_report->add_option("--size", size, "small or large")
      ->check(CLI::IsMember({"small", "large"}));
  c_report->footer("Output: cost.csv, diameter.csv, collectives.csv, alltoall.csv "
                   "(config,share_of_injection), allreduce.csv (config,share_of_peak), "
                   "utilization.csv, workloads.csv, manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  Sink sink(out, out_dir);
  try {
    const PriceTable prices = load_prices(prices_path);
    CostParams cp;
    if (alpha > 0.0) cp.alpha_s = alpha;

    if (*c_topo) {
      TopologySpec spec = parse_topology_arg(topo);
      set_planes(spec, planes);
      const Topology t = build_topology(spec);
      sink.emit("topology.json", topology_stats(t, prices).dump(2) + "\n");
      if (edges) {
        std::ostringstream os;
        write_edge_csv(t, os);
        sink.emit("edges.csv", os.str());
      }
    } else if (*c_cost) {
      if (!topo.empty()) {
        TopologySpec spec = parse_topology_arg(topo);
        set_planes(spec, planes);
        const Topology t = build_topology(spec);
        const EquipmentCount e = count_equipment(t);
        sink.emit("cost.csv", "config,switches,dac,aoc,cost_usd\n" + spec.name + "," +
                                  std::to_string(e.switches) + "," + std::to_string(e.dac) +
                                  "," + std::to_string(e.aoc) + "," +
                                  fmt(price(e, prices), 10) + "\n");
      } else {
        if (suite != "table1") {
          report_error(err, "usage", "cost needs --suite table1 or --topo");
          err << c_cost->help();
          return kExitUsage;
        }
        sink.emit("cost.csv", cost_csv(prices));
      }
    } else if (*c_diam) {
      if (!topo.empty()) {
        const TopologySpec spec = parse_topology_arg(topo);
        const Topology t = build_topology(spec);
        std::string analytic;
        if (spec.family == Family::kHxMesh || spec.family == Family::kHyperX) {
          analytic = std::to_string(analytic_diameter(std::get<HxMeshParams>(spec.params)));
        }
        sink.emit("diameter.csv", "config,bfs,analytic\n" + spec.name + "," +
                                      std::to_string(bfs_diameter(t)) + "," + analytic + "\n");
      } else {
        if (suite != "table1") {
          report_error(err, "usage", "diameter needs --suite table1 or --topo");
          err << c_diam->help();
          return kExitUsage;
        }
        sink.emit("diameter.csv", diameter_csv(sizes_of(size)));
      }
    } else if (*c_alloc) {
      sink.emit("utilization.csv", alloc_csv(aa));
    } else if (*c_route) {
      const Topology t = build_topology(parse_topology_arg(topo));
      const DeadlockReport r = deadlock_check(
          t, scheme == "minimal" ? RoutingScheme::kMinimalAdaptive : RoutingScheme::kDimensionOrder,
          channel_limit);
      json w = json::array();
      for (const Hop& h : r.witness) w.push_back({{"channel", h.channel}, {"vc", h.vc}});
      sink.emit("route_check.json", json{{"topology", t.spec().name},
                                         {"scheme", scheme},
                                         {"acyclic", r.acyclic},
                                         {"max_vc", r.max_vc},
                                         {"cdg_nodes", r.cdg_nodes},
                                         {"cdg_edges", r.cdg_edges},
                                         {"witness", w}}
                                            .dump(2) +
                                        "\n");
    } else if (*c_sim) {
      if (pattern.empty() && pattern_file.empty()) {
        report_error(err, "usage", "sim needs --pattern or --pattern-file");
        err << c_sim->help();
        return kExitUsage;
      }
      require(stride >= 1, "stride must be positive");
      const Topology t = build_topology(parse_topology_arg(topo));
      const JobGrid g = whole_machine_grid(t);
      SimOptions opt;
      opt.alpha_s = alpha;
      opt.split = split == "best" ? SplitMode::kBestPath : SplitMode::kUniform;
      BandwidthReport rep;
      json extra = json::object();
      const int p = static_cast<int>(g.nodes.size());
      if (!pattern_file.empty()) {
        rep = simulate_flows(t, g.nodes, pattern_from_json(read_json(pattern_file)), opt);
      } else if (pattern == "alltoall" || pattern == "permutation") {
        const PatternKind k = pattern_from_string(pattern);
        rep = simulate_flows(t, g.nodes, stride_phases(make_pattern(k, {p, msg_size, seed}), stride),
                             opt);
        if (stride > 1) extra["sampled_stride"] = stride;
      } else {
        const CollectiveResult r =
            simulate_collective(t, g, {collective_from_string(pattern), p, msg_size}, opt);
        rep = r.report;
        extra["share_of_peak"] = r.share_of_peak;
        extra["embedded"] = r.embedded;
      }
      if (format == "csv") {
        sink.emit("sim.csv", rep.to_csv());
      } else {
        json j = rep.to_json();
        j["topology"] = t.spec().name;
        j["pattern"] = pattern_file.empty() ? pattern : pattern_file;
        j.update(extra);
        sink.emit("sim.json", j.dump(2) + "\n");
      }
    } else if (*c_work) {
      const json overrides = parse_overrides(sets);
      if (!suite.empty()) {
        std::vector<std::string> presets =
            preset.empty() || preset == "all" ? dnn_presets() : std::vector<std::string>{preset};
        sink.emit("workloads.csv",
                  workload_suite_csv(presets, sizes_of(suite).at(0), overrides, cp));
        return kExitOk;
      }
      if (preset.empty() == trace_file.empty()) {
        report_error(err, "usage", "workload needs exactly one of --preset or --trace");
        err << c_work->help();
        return kExitUsage;
      }
      const PhaseTrace tr = trace_file.empty() ? build_dnn_trace(preset, overrides)
                                               : PhaseTrace::from_json(read_json(trace_file));
      if (emit_trace) {
        sink.emit("trace.json", tr.to_json().dump(2) + "\n");
        return kExitOk;
      }
      if (topo.empty()) {
        report_error(err, "usage", "workload needs --topo");
        err << c_work->help();
        return kExitUsage;
      }
      const Topology t = build_topology(parse_topology_arg(topo));
      const IterationResult r = iteration_time(tr, t, place_job(t, tr.job_rows, tr.job_cols), cp);
      json j = r.to_json();
      j["workload"] = tr.name;
      j["topology"] = t.spec().name;
      sink.emit("workload.json", j.dump(2) + "\n");
    } else if (*c_report) {
      if (out_dir.empty()) {
        report_error(err, "usage", "report needs --out or HXMESH_OUT");
        return kExitUsage;
      }
      const SizeClass sz = sizes_of(size).at(0);
      const int a2a_stride = quick ? 64 : 1;
      sink.emit("cost.csv", cost_csv(prices));
      sink.emit("diameter.csv", diameter_csv({sz}));
      sink.emit("collectives.csv", collectives_csv(cp));
      std::ostringstream a2a, ar;
      a2a << "config,share_of_injection,stride\n";
      ar << "config,algorithm,bytes,share_of_peak\n";
      for (const ReferenceConfig& c : reference_configs()) {
        if (c.size != sz) continue;
        const Topology t = build_topology(c.spec);
        a2a << c.label << ',' << fmt(alltoall_share(t, 1e6, a2a_stride), 4) << ',' << a2a_stride
            << '\n';
        const JobGrid g = whole_machine_grid(t);
        const int p = static_cast<int>(g.nodes.size());
        for (CollectiveKind k : {CollectiveKind::kRing, CollectiveKind::kTwoRings}) {
          const CollectiveResult r = simulate_collective(t, g, {k, p, 1e9});
          ar << c.label << ',' << to_string(k) << ",1e9," << fmt(r.share_of_peak, 4) << '\n';
        }
      }
      sink.emit("alltoall.csv", a2a.str());
      sink.emit("allreduce.csv", ar.str());
      AllocArgs u;
      u.mesh = sz == SizeClass::kSmall ? "hx2:16x16" : "hx2:64x64";
      u.traces = quick ? 50 : 1000;
      u.summary = true;
      u.heuristics = {"base", "transpose", "transpose,sort", "transpose,aspect,sort",
                      "transpose,aspect,sort,locality"};
      sink.emit("utilization.csv", alloc_csv(u));
      sink.emit("workloads.csv", workload_suite_csv(dnn_presets(), SizeClass::kSmall, {}, cp));
      json files = {"cost.csv", "diameter.csv", "collectives.csv", "alltoall.csv",
                    "allreduce.csv", "utilization.csv", "workloads.csv"};
      sink.emit("manifest.json", json{{"size", size}, {"quick", quick}, {"files", files}}.dump(2) +
                                     "\n");
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return exit_for(e.code());
  } catch (const fs::filesystem_error& e) {
    report_error(err, "file", e.what());
    return kExitFile;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitModule;
  }
  return kExitOk;
}

}  // namespace hxmesh
