#include <doctest.h>

#include <map>

#include "hxmesh/topology_io.hpp"
#include "hxmesh/workloads.hpp"

using namespace hxmesh;

namespace {

struct OpCount {
  int instances = 0;
  double bytes = 0.0;  // summed over instances
};

OpCount count_ops(const PhaseTrace& t, OpKind kind) {
  OpCount c;
  for (const TracePhase& ph : t.phases) {
    for (const CommOp& op : ph.ops) {
      if (op.kind != kind) continue;
      c.instances += ph.repeat;
      c.bytes += op.bytes * ph.repeat;
    }
  }
  return c;
}

Topology small(const std::string& label) {
  return build_topology(reference_config(label, SizeClass::kSmall).spec);
}

}  // namespace

TEST_CASE("communication volumes") {
  WorkloadConfig w;
  w.n_params = 60.2e6;
  CHECK(comm_volumes(w).v_d == doctest::Approx(240.8e6));
  w.D = 1024;
  CHECK(comm_volumes(w).v_d == doctest::Approx(240.8e6));

  WorkloadConfig g;
  g.n_act = 2048.0 * 12288.0;
  g.n_params = 1.0;
  g.M = 1;
  CHECK(comm_volumes(g).v_p == doctest::Approx(100.66e6).epsilon(1e-3));

  WorkloadConfig a;
  a.n_params = 1e6;
  a.n_act = 1e5;
  a.M = 64;
  a.D = 2;
  a.P = 3;
  a.O = 2;
  WorkloadConfig b = a;
  b.O = 4;
  CHECK(comm_volumes(b).v_d == doctest::Approx(comm_volumes(a).v_d / 2));
  b = a;
  b.M = 128;
  CHECK(comm_volumes(b).v_p == doctest::Approx(2 * comm_volumes(a).v_p));
  b = a;
  b.D = 4;
  CHECK(comm_volumes(b).v_p == doctest::Approx(comm_volumes(a).v_p / 2));

  a.n_params = 0;
  CHECK_THROWS_AS(comm_volumes(a), Error);
}

TEST_CASE("resnet trace") {
  const PhaseTrace t = build_dnn_trace("resnet152");
  CHECK(t.job_rows * t.job_cols == 1024);
  CHECK(t.compute_s() == doctest::Approx(108e-3));
  const OpCount ar = count_ops(t, OpKind::kAllreduce);
  CHECK(ar.instances == 10);
  CHECK(ar.bytes == doctest::Approx(240.8e6));
  for (const TracePhase& ph : t.phases) {
    for (const CommOp& op : ph.ops) {
      CHECK(op.bytes == doctest::Approx(24.08e6));
      REQUIRE(op.groups.size() == 1);
      CHECK(op.groups[0].ranks.size() == 1024);
    }
  }
  const PhaseTrace small_job = build_dnn_trace("resnet152", {{"D", 256}});
  CHECK(small_job.job_rows == 16);
  CHECK(small_job.job_cols == 16);
}

TEST_CASE("dlrm trace") {
  const PhaseTrace t = build_dnn_trace("dlrm");
  CHECK(t.job_rows == 8);
  CHECK(t.job_cols == 16);
  const OpCount a2a = count_ops(t, OpKind::kAlltoall);
  CHECK(a2a.instances == 2);
  CHECK(a2a.bytes == doctest::Approx(2e6));
  const OpCount ar = count_ops(t, OpKind::kAllreduce);
  CHECK(ar.instances == 1);
  CHECK(ar.bytes == doctest::Approx(2.96e6));
  std::vector<double> compute;
  for (const TracePhase& ph : t.phases) {
    if (ph.compute_s > 0) compute.push_back(ph.compute_s);
  }
  CHECK(compute == std::vector<double>{95e-6, 209e-6, 796e-6, 796e-6, 209e-6, 95e-6});
}

TEST_CASE("gpt-3 trace") {
  const PhaseTrace t = build_dnn_trace("gpt3");
  CHECK(t.config.P == 96);
  CHECK(t.config.O == 4);
  CHECK(t.job_rows * t.job_cols == 384);
  CHECK(t.job_cols % 4 == 0);
  CHECK(t.compute_s() == doctest::Approx(31.8e-3));
  const OpCount ar = count_ops(t, OpKind::kAllreduce);
  CHECK(ar.instances == 4);  // FF and MHA, both passes
  const double act = 4.0 * 2048 * 12288;
  CHECK(ar.bytes == doctest::Approx(4 * act));
  const OpCount p2p = count_ops(t, OpKind::kSendRecv);
  CHECK(p2p.bytes == doctest::Approx(2 * act / 4));  // V_P each way
  CHECK(p2p.bytes / 2 == doctest::Approx(comm_volumes(t.config).v_p));
  for (const TracePhase& ph : t.phases) {
    for (const CommOp& op : ph.ops) {
      if (op.kind == OpKind::kAllreduce) {
        CHECK(op.groups.size() == 96);
        for (const RankGroup& g : op.groups) CHECK(g.ranks.size() == 4);
      } else {
        CHECK(op.background);
        CHECK(op.groups.size() == 95 * 4);
      }
    }
  }
  // Consecutive stages are neighbours in the job grid.
  const auto& groups = t.phases[0].ops[0].groups;
  for (std::size_t s = 0; s + 1 < groups.size(); ++s) {
    const int a = groups[s].ranks[0], b = groups[s + 1].ranks[0];
    const int dr = std::abs(a / t.job_cols - b / t.job_cols);
    const int dc = std::abs(a % t.job_cols - b % t.job_cols);
    CHECK(((dr == 0 && dc == 4) || (dr == 1 && dc == 0)));
  }

  const PhaseTrace few = build_dnn_trace("gpt3", {{"microbatches_in_flight", 8}});
  CHECK(few.phases[0].ops[0].groups.size() == 8);
  const PhaseTrace dp = build_dnn_trace("gpt3", {{"D", 2}, {"P", 8}});
  CHECK(count_ops(dp, OpKind::kAllreduce).instances == 5);
}

TEST_CASE("moe and cosmoflow traces") {
  const PhaseTrace m = build_dnn_trace("gpt3_moe");
  CHECK(m.compute_s() == doctest::Approx(49.9e-3));
  const OpCount a2a = count_ops(m, OpKind::kAlltoall);
  CHECK(a2a.instances == 4);
  CHECK(count_ops(m, OpKind::kAllreduce).instances == 2);
  for (const TracePhase& ph : m.phases) {
    for (const CommOp& op : ph.ops) {
      if (op.kind == OpKind::kAlltoall) {
        CHECK(op.groups.size() == 24);
        CHECK(op.groups[0].ranks.size() == 16);
      }
    }
  }

  const PhaseTrace c = build_dnn_trace("cosmoflow");
  CHECK(c.config.D == 256);
  CHECK(c.config.O == 4);
  CHECK(c.compute_s() == doctest::Approx(44.3e-3));
  CHECK(count_ops(c, OpKind::kAllreduce).bytes == doctest::Approx(comm_volumes(c.config).v_d));
  CHECK(comm_volumes(c.config).v_d == doctest::Approx(8.9e6));
  CHECK(count_ops(c, OpKind::kAllgather).instances == 1);
  CHECK(count_ops(c, OpKind::kReduceScatter).instances == 1);
  const double halo1 = count_ops(c, OpKind::kSendRecv).bytes;
  const double halo2 = count_ops(build_dnn_trace("cosmoflow", {{"halo_depth", 2}}), OpKind::kSendRecv).bytes;
  CHECK(halo2 == doctest::Approx(2 * halo1));
}

TEST_CASE("trace errors and serialization") {
  CHECK_THROWS_AS(build_dnn_trace("bert"), Error);
  CHECK_THROWS_AS(build_dnn_trace("gpt3", {{"depth", 3}}), Error);
  CHECK_THROWS_AS(build_dnn_trace("gpt3", {{"P", 0}}), Error);
  for (const std::string& p : dnn_presets()) {
    const PhaseTrace t = build_dnn_trace(p);
    const PhaseTrace back = PhaseTrace::from_json(t.to_json());
    CHECK(back.to_json() == t.to_json());
  }
  CHECK_THROWS_AS(PhaseTrace::from_json({{"name", "x"}}), Error);
}

TEST_CASE("iteration time accounting") {
  const Topology t = small("hx2mesh");
  PhaseTrace tr;
  tr.config.n_params = 1;
  tr.job_rows = 2;
  tr.job_cols = 4;
  tr.phases = {{"a", 1e-3, false, 3, {}}, {"b", 2e-3, true, 1, {}}};
  const JobGrid g = place_job(t, 2, 4);
  IterationResult r = iteration_time(tr, t, g);
  CHECK(r.total_s == doctest::Approx(5e-3));
  CHECK(r.overhead == 0.0);

  std::vector<int> all(8);
  for (int i = 0; i < 8; ++i) all[i] = i;
  tr.phases[1].ops = {{OpKind::kAllreduce, {{2, 4, all}}, 1e6, false, "x"}};
  r = iteration_time(tr, t, g);
  CHECK(r.overhead == 0.0);  // hidden behind 2 ms of compute
  CHECK(r.phases[1].comm_s > 0.0);
  CHECK(r.phases[1].comm_s < 2e-3);

  tr.phases[1].overlap = false;
  r = iteration_time(tr, t, g);
  CHECK(r.overhead > 0.0);
  CHECK(r.total_s == doctest::Approx(5e-3 + r.phases[1].comm_s));

  CHECK_THROWS_AS(iteration_time(tr, t, place_job(t, 2, 2)), Error);
}

TEST_CASE("job placement") {
  const Topology hx4 = small("hx4mesh");
  CHECK_THROWS_AS(place_job(hx4, 2, 4), Error);
  const JobGrid g = place_job(hx4, 8, 4);
  CHECK(g.nodes.size() == 32);
  const Topology torus = small("torus");
  const JobGrid tg = place_job(torus, 3, 5);
  CHECK(tg.at(2, 4) == torus.accelerator_at(4, 2));
  const Topology ft = small("nonblocking_ft");
  CHECK(place_job(ft, 4, 4).at(1, 1) == 5);
  CHECK_THROWS_AS(place_job(ft, 64, 64), Error);
}

TEST_CASE("gpt-3 ordering across networks") {
  const PhaseTrace tr = build_dnn_trace("gpt3");
  std::map<std::string, double> time;
  for (const std::string label : {"nonblocking_ft", "taper50_ft", "taper75_ft", "hyperx",
                                  "hx2mesh", "hx4mesh", "torus"}) {
    const Topology t = small(label);
    time[label] = iteration_time(tr, t, place_job(t, tr.job_rows, tr.job_cols)).total_s;
  }
  const double worst_ft =
      std::max({time["nonblocking_ft"], time["taper50_ft"], time["taper75_ft"]});
  CHECK(worst_ft < time["hyperx"]);
  CHECK(time["hyperx"] < time["hx2mesh"]);
  CHECK(time["hx2mesh"] < time["hx4mesh"]);
  CHECK(time["hx4mesh"] < time["torus"]);
}

TEST_CASE("cost savings") {
  CHECK(cost_savings(10, 2, 5, 1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(cost_savings(0, 1, 1, 1), Error);
}
