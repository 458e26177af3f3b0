#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "k3_oracle.hpp"
#include "ngsim/errors.hpp"
#include "ngsim/experiment.hpp"

using namespace ngsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ngsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("seed derivation is collision free over a million indices") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t i = 0; i < 1'000'000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1'000'000);
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("config parsing") {
  ExperimentConfig c;
  c.apply_text("# comment\ntopology.kind = sw_rgg\ntopology.n=2048\n\ntopology.p=0.05\nrun.runs=3\n"
               "snapshot.times=1, 43,169\nfit.nd=2,20\n");
  CHECK(c.topology.kind == TopologyKind::sw_rgg);
  CHECK(c.topology.n == 2048);
  CHECK(c.topology.shortcut_density == 0.05);
  CHECK(c.runs == 3);
  CHECK(c.snapshot_times == std::vector<double>{1, 43, 169});
  CHECK(c.fit_nd.lo == 2.0);
  CHECK_NOTHROW(c.validate());
  CHECK(c.box_length() == doctest::Approx(std::sqrt(2048.0)));

  c.set("topology.radius", "2");
  CHECK_FALSE(c.topology.avg_degree);
  CHECK(c.target_degree() == doctest::Approx(M_PI * 4.0));

  CHECK_THROWS_AS(c.set("topology.bogus", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("run.runs", "-1"), ConfigError);
  CHECK_THROWS_AS(c.set("fit.nw", "3"), ConfigError);
  CHECK_THROWS_AS(c.apply_text("no equals sign"), ConfigError);

  ExperimentConfig lat;
  lat.set("topology.kind", "lattice2d");
  lat.set("topology.n", "1000");
  CHECK_THROWS_AS(lat.validate(), ConfigError);
  lat.set("topology.n", "1024");
  CHECK_NOTHROW(lat.validate());
  CHECK(lat.target_degree() == 4.0);

  ExperimentConfig snaps;
  snaps.snapshot_times = {5, 1};
  CHECK_THROWS_AS(snaps.validate(), ConfigError);

  ExperimentConfig sweep;
  sweep.set("sweep.axis", "p");
  sweep.set("sweep.values", "0.1,0.2,0.3");
  CHECK_THROWS_AS(sweep.validate(), ConfigError);  // needs sw_rgg
}

TEST_CASE("presets load and validate; overrides win") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(name, std::nullopt, {}));
  }
  auto c = load_config("fig2", std::nullopt, {"run.runs=5", "topology.n=256"});
  CHECK(c.runs == 5);
  CHECK(c.topology.n == 256);
  CHECK(*c.topology.avg_degree == 12.0);
  CHECK_THROWS_AS(load_config("nope", std::nullopt, {}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, std::nullopt, {"topology.k"}), ConfigError);

  auto dir = scratch("cfgfile");
  fs::create_directories(dir);
  std::ofstream(dir / "exp.cfg") << "topology.n=300\nrun.seed=9\n";
  auto f = load_config("fig2", dir / "exp.cfg", {"run.seed=10"});
  CHECK(f.topology.n == 300);
  CHECK(f.master_seed == 10);
}

TEST_CASE("build_graph honours topology and connectivity policy") {
  Rng rng(1);
  ExperimentConfig c;
  c.topology.n = 400;
  c.topology.avg_degree = 10.0;
  auto r = build_graph(c, rng);
  CHECK(r.graph.node_count() == 400);
  CHECK(connected_components(r.graph).count() == 1);

  c.topology.avg_degree = 2.0;  // far below percolation
  c.topology.connectivity = ConnectivityPolicy::giant_component;
  auto g = build_graph(c, rng);
  CHECK(g.graph.node_count() < 400);
  CHECK(connected_components(g.graph).count() == 1);
  c.topology.connectivity = ConnectivityPolicy::regenerate;
  CHECK_THROWS_AS(build_graph(c, rng), TopologyError);

  c.topology.kind = TopologyKind::sw_rgg;
  c.topology.avg_degree = 10.0;
  c.topology.shortcut_density = 0.05;
  CHECK(build_graph(c, rng).graph.shortcut_edges().size() == 20);
}

TEST_CASE("ensemble output is independent of worker count") {
  auto c = load_config("fig2", std::nullopt, {"topology.n=200", "run.runs=6", "run.seed=77"});
  auto one = run_ensemble(c);
  c.workers = 3;
  auto three = run_ensemble(c);
  std::ostringstream a, b;
  write_ensemble_csv(a, one.series);
  write_ensemble_csv(b, three.series);
  CHECK(a.str() == b.str());
  CHECK(summary_row(c, one) == summary_row(c, three));
  CHECK(one.t_c == three.t_c);
}

TEST_CASE("ensemble of identical deterministic runs has zero spread") {
  // Complete graph under broadcast: every realization is the same one-step run.
  auto c = load_config(std::nullopt, std::nullopt,
                       {"topology.kind=complete", "topology.n=16", "run.runs=4", "run.max_time=10"});
  auto r = run_ensemble(c);
  for (const auto& p : r.series.points) {
    CHECK(p.nw_std == 0.0);
    CHECK(p.nd_std == 0.0);
  }
  REQUIRE(r.stats);
  CHECK(r.stats->mean_tc == 1.0 / 16.0);
  CHECK(r.stats->std_tc == 0.0);
}

TEST_CASE("K3 pairwise ensemble matches the exact chain") {
  auto c = load_config(std::nullopt, std::nullopt,
                       {"topology.kind=complete", "topology.n=3", "dynamics.mode=pairwise", "run.runs=100000",
                        "run.max_time=1000", "schedule.t_min=1", "schedule.points_per_decade=1"});
  auto r = run_ensemble(c);
  REQUIRE(r.stats);
  CHECK(r.unconverged == 0);
  const auto m = k3_oracle::pairwise_triangle();
  const double exact = m.mean_steps / 3.0;
  const double se = r.stats->std_tc / std::sqrt(static_cast<double>(r.stats->run_count));
  CHECK(std::abs(r.stats->mean_tc - exact) < 3.0 * se);
}

TEST_CASE("file formats") {
  ExperimentConfig c;
  EnsembleResult r;
  r.t_c = {1.0, std::nullopt};
  r.stats = ConvergenceStats{1.0, 0.0, 1, 1};
  r.unconverged = 1;
  r.k_measured_mean = 11.5;
  CHECK(summary_header() == "n,k_target,k_measured_mean,p,mode,runs,unconverged,mean_tc,std_tc");
  CHECK(summary_row(c, r) == "1024,12,11.5,0,broadcast,2,1,1,0");

  EnsembleSeries s;
  s.run_count = 1;
  s.points.push_back({0.1, 3.0, 0.0, 2.0, 0.0, std::nan(""), std::nan(""), 0});
  std::ostringstream out;
  write_ensemble_csv(out, s);
  CHECK(out.str() == "t,nw_mean,nw_std,nd_mean,nd_std,s_mean,s_std\n0.1,3,0,2,0,nan,nan\n");

  Rng rng(1);
  RggConfig rc{3, 2.0, 0.5, std::nullopt, Boundary::free};
  Graph g = generate_rgg(rc, rng);
  SimState st(3);
  const Word w = st.invent_word(), v = st.invent_word();
  st.set_vocabulary(0, std::vector{w});
  st.set_vocabulary(1, std::vector{w, v});
  auto rows = take_snapshot(st, g);
  CHECK(rows[0].word == 0);
  CHECK(rows[1].word == -1);
  CHECK(rows[2].word == -1);
  CHECK(rows[2].vocab_size == 0);
  std::ostringstream snap;
  write_snapshot(snap, 43.0, g, rows);
  CHECK(snap.str().rfind("# t=43 n=3 L=2\nid,x,y,vocab_size,word\n0,", 0) == 0);
  CHECK_THROWS_AS(take_snapshot(st, generate_complete(3)), ConfigError);
}

TEST_CASE("commands write their files") {
  auto dir = scratch("cmds");
  std::ostringstream log;

  auto complete = load_config(std::nullopt, std::nullopt, {"topology.kind=complete", "topology.n=4"});
  CHECK(cmd_gen_graph(complete, dir / "k4.txt", log) == ExitCode::ok);
  CHECK(slurp(dir / "k4.txt") == "n=4 L=- boundary=-\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");

  auto run16 = load_config(std::nullopt, std::nullopt, {"topology.kind=complete", "topology.n=16"});
  log.str("");
  CHECK(cmd_run(run16, dir / "run16", log) == ExitCode::ok);
  CHECK(log.str().find("t_c=0.0625") != std::string::npos);
  CHECK(fs::exists(dir / "run16" / "series.csv"));

  auto snap_on_complete =
      load_config(std::nullopt, std::nullopt, {"topology.kind=complete", "topology.n=16", "snapshot.times=1"});
  CHECK(cmd_run(snap_on_complete, dir / "bad", log) == ExitCode::config_error);

  auto stuck = load_config(std::nullopt, std::nullopt,
                           {"topology.kind=lattice2d", "topology.n=400", "dynamics.mode=pairwise", "run.max_time=1"});
  CHECK(cmd_run(stuck, dir / "stuck", log) == ExitCode::not_converged);
  CHECK(fs::exists(dir / "stuck" / "series.csv"));

  auto no_room = load_config(std::nullopt, std::nullopt,
                             {"topology.kind=sw_rgg", "topology.n=20", "topology.k=30", "topology.p=1"});
  CHECK(cmd_gen_graph(no_room, dir / "x.txt", log) == ExitCode::topology_error);

  auto ens = load_config("fig2", std::nullopt, {"topology.n=128", "run.runs=3"});
  CHECK(cmd_ensemble(ens, dir / "ens", log) == ExitCode::ok);
  for (auto f : {"ensemble.csv", "summary.csv", "fits.csv", "realizations.csv"})
    CHECK(fs::exists(dir / "ens" / f));

  auto sweep = load_config("fig6", std::nullopt, {"sweep.values=64,128,256", "run.runs=2"});
  CHECK(cmd_sweep(sweep, dir / "sweep", log) == ExitCode::ok);
  CHECK(fs::exists(dir / "sweep" / "sweep.csv"));
  CHECK(fs::exists(dir / "sweep" / "n_128" / "ensemble.csv"));
  const std::string table = slurp(dir / "sweep" / "sweep.csv");
  CHECK(table.rfind(summary_header() + ",sw_onset\n", 0) == 0);

  // an unwritable destination is an I/O error
  std::ofstream(dir / "file") << "x";
  CHECK(cmd_gen_graph(complete, dir / "file" / "sub" / "g.txt", log) == ExitCode::io_error);
}
