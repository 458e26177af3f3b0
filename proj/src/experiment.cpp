#include "ngsim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "ngsim/errors.hpp"
#include "ngsim/format.hpp"

namespace ngsim {

namespace fs = std::filesystem;

Realization build_graph(const ExperimentConfig& config, Rng& rng) {
  const auto& t = config.topology;
  switch (t.kind) {
    case TopologyKind::rgg:
    case TopologyKind::sw_rgg: {
      RggConfig rgg;
      rgg.n = t.n;
      rgg.box_length = config.box_length();
      rgg.radius = t.radius;
      rgg.target_avg_degree = t.avg_degree;
      rgg.boundary = t.boundary;
      std::optional<SwConfig> sw;
      if (t.kind == TopologyKind::sw_rgg) sw = SwConfig{t.shortcut_density};
      if (t.connectivity == ConnectivityPolicy::regenerate) {
        auto c = generate_connected_rgg(rgg, sw, rng);
        return {std::move(c.graph), c.attempts};
      }
      Graph g = generate_rgg(rgg, rng);
      if (sw) g = add_shortcuts(g, *sw, rng);
      return {giant_component(g), 1};
    }
    case TopologyKind::lattice2d: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(t.n))));
      return {generate_lattice_2d(side, t.periodic), 1};
    }
    case TopologyKind::complete:
      return {generate_complete(t.n), 1};
  }
  throw ConfigError("unhandled topology kind");
}

namespace {

bool is_random_topology(const ExperimentConfig& c) {
  return c.topology.kind == TopologyKind::rgg || c.topology.kind == TopologyKind::sw_rgg;
}

struct RealizationSlot {
  RunSeries series;
  std::optional<double> t_c;
  double k_measured = 0.0;
  std::size_t nodes = 0;
  int attempts = 0;
  std::exception_ptr error;
};

template <class Fit>
std::optional<FitResult> try_fit(Fit&& fit) {
  try {
    return fit();
  } catch (const FitError&) {
    return std::nullopt;
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

EnsembleResult run_ensemble(const ExperimentConfig& config) {
  config.validate();
  const SampleSchedule schedule = config.schedule();
  std::optional<Graph> shared;
  if (!is_random_topology(config)) {
    Rng unused(config.master_seed);
    shared = build_graph(config, unused).graph;
  }

  std::vector<RealizationSlot> slots(config.runs);
  auto realize = [&](std::size_t i) {
    RealizationSlot& slot = slots[i];
    try {
      Rng rng(derive_seed(config.master_seed, i));
      std::optional<Realization> own;
      if (!shared) own = build_graph(config, rng);
      const Graph& g = shared ? *shared : own->graph;
      SeriesRecorder recorder(schedule);
      RunResult r = run(g, config.mode, rng, recorder, config.max_time);
      slot.series = std::move(recorder).finish(g.node_count(), r.t_c);
      slot.t_c = r.t_c;
      slot.k_measured = measured_avg_degree(g);
      slot.nodes = g.node_count();
      slot.attempts = own ? own->attempts : 1;
    } catch (...) {
      slot.error = std::current_exception();
    }
  };

  const std::size_t workers = std::min(config.workers, config.runs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < config.runs; ++i) realize(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < config.runs; i = next++) realize(i);
      });
  }
  for (auto& s : slots)
    if (s.error) std::rethrow_exception(s.error);

  EnsembleResult out;
  std::vector<RunSeries> series;
  std::vector<double> converged_tc, nodes;
  series.reserve(slots.size());
  for (auto& s : slots) {
    series.push_back(std::move(s.series));
    out.t_c.push_back(s.t_c);
    out.k_measured.push_back(s.k_measured);
    out.nodes.push_back(s.nodes);
    out.attempts.push_back(s.attempts);
    nodes.push_back(static_cast<double>(s.nodes));
    if (s.t_c) converged_tc.push_back(*s.t_c);
    else ++out.unconverged;
  }
  out.series = aggregate(series);
  if (!converged_tc.empty()) out.stats = convergence_stats(converged_tc, out.unconverged);
  out.k_measured_mean = mean_of(out.k_measured);
  out.n_mean = mean_of(nodes);
  out.fits = fit_ensemble(out.series, out.n_mean, config);
  return out;
}

EnsembleFits fit_ensemble(const EnsembleSeries& series, double n, const ExperimentConfig& config) {
  std::vector<double> t, nw, nd, fail;
  for (const auto& p : series.points) {
    t.push_back(p.t);
    nw.push_back(p.nw_mean / n - 1.0);
    nd.push_back(p.nd_mean / n);
    fail.push_back(std::isnan(p.s_mean) ? 0.0 : 1.0 - p.s_mean);
  }
  EnsembleFits fits;
  fits.nw = try_fit([&] { return fit_power_law(t, nw, config.fit_nw); });
  fits.nd = try_fit([&] { return fit_power_law(t, nd, config.fit_nd); });
  fits.s = try_fit([&] { return fit_power_law(t, fail, config.fit_s); });
  return fits;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.sweep_axis == SweepAxis::none) throw ConfigError("sweep.axis is not set");
  SweepResult out;
  for (std::size_t j = 0; j < config.sweep_values.size(); ++j) {
    SweepRow row;
    row.value = config.sweep_values[j];
    row.config = config;
    row.config.sweep_axis = SweepAxis::none;
    row.config.sweep_values.clear();
    row.config.master_seed = derive_seed(config.master_seed, j);
    if (config.sweep_axis == SweepAxis::n) row.config.topology.n = static_cast<std::size_t>(row.value);
    else row.config.topology.shortcut_density = row.value;
    row.result = run_ensemble(row.config);
    out.rows.push_back(std::move(row));
  }

  std::vector<double> x, mean, sd;
  for (const auto& row : out.rows) {
    if (!row.result.stats) continue;
    x.push_back(row.value);
    mean.push_back(row.result.stats->mean_tc);
    sd.push_back(row.result.stats->std_tc);
  }
  const auto [lo, hi] = std::minmax_element(config.sweep_values.begin(), config.sweep_values.end());
  const FitWindow window = config.fit_tc.value_or(FitWindow{*lo, *hi});
  out.mean_tc_fit = try_fit([&] { return fit_power_law(x, mean, window); });
  if (config.sweep_axis == SweepAxis::n) out.std_tc_fit = try_fit([&] { return fit_power_law(x, sd, window); });
  return out;
}

void write_ensemble_csv(std::ostream& out, const EnsembleSeries& series) {
  out << "t,nw_mean,nw_std,nd_mean,nd_std,s_mean,s_std\n";
  for (const auto& p : series.points)
    out << format_double(p.t) << ',' << format_double(p.nw_mean) << ',' << format_double(p.nw_std) << ','
        << format_double(p.nd_mean) << ',' << format_double(p.nd_std) << ',' << format_double(p.s_mean)
        << ',' << format_double(p.s_std) << '\n';
}

std::string summary_header() { return "n,k_target,k_measured_mean,p,mode,runs,unconverged,mean_tc,std_tc"; }

std::string summary_row(const ExperimentConfig& config, const EnsembleResult& result) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double p = config.topology.kind == TopologyKind::sw_rgg ? config.topology.shortcut_density : 0.0;
  std::string row = std::to_string(config.topology.n);
  row += ',' + format_double(config.target_degree());
  row += ',' + format_double(result.k_measured_mean);
  row += ',' + format_double(p);
  row += ',' + std::string(to_string(config.mode));
  row += ',' + std::to_string(result.t_c.size());
  row += ',' + std::to_string(result.unconverged);
  row += ',' + format_double(result.stats ? result.stats->mean_tc : nan);
  row += ',' + format_double(result.stats ? result.stats->std_tc : nan);
  return row;
}

namespace {

void write_fit_row(std::ostream& out, const std::string& name, const std::optional<FitResult>& f) {
  out << name;
  if (!f) {
    out << ",nan,nan,nan,nan,nan,0\n";
    return;
  }
  out << ',' << format_double(f->exponent) << ',' << format_double(f->amplitude) << ','
      << format_double(f->window.lo) << ',' << format_double(f->window.hi) << ','
      << format_double(f->r_squared) << ',' << f->point_count << '\n';
}

constexpr const char* kFitHeader = "quantity,exponent,amplitude,x_lo,x_hi,r_squared,points\n";

}  // namespace

void write_fits_csv(std::ostream& out, const EnsembleFits& fits) {
  out << kFitHeader;
  write_fit_row(out, "nw_over_n_minus_1", fits.nw);
  write_fit_row(out, "nd_over_n", fits.nd);
  write_fit_row(out, "one_minus_s", fits.s);
}

std::vector<SnapshotRow> take_snapshot(const SimState& state, const Graph& g) {
  if (!g.positions()) throw ConfigError("snapshots need a spatial topology");
  std::vector<SnapshotRow> rows(state.node_count());
  for (NodeId u = 0; u < state.node_count(); ++u) {
    const auto& v = state.vocabulary(u);
    rows[u] = {u, (*g.positions())[u], v.size(), v.size() == 1 ? std::int64_t{v.front().token} : -1};
  }
  return rows;
}

void write_snapshot(std::ostream& out, double requested_t, const Graph& g, const std::vector<SnapshotRow>& rows) {
  out << "# t=" << format_double(requested_t) << " n=" << g.node_count()
      << " L=" << (g.box_length() ? format_double(*g.box_length()) : "-") << '\n';
  out << "id,x,y,vocab_size,word\n";
  for (const auto& r : rows)
    out << r.id << ',' << format_double(r.pos.x) << ',' << format_double(r.pos.y) << ',' << r.vocab_size
        << ',' << r.word << '\n';
}

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

template <class Body>
void write_file(const fs::path& path, Body&& body) {
  auto out = open_output(path);
  body(out);
  close_output(out, path);
}

template <class F>
int guarded(std::ostream& log, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const ParameterError& e) {
    log << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const TopologyError& e) {
    log << "topology error: " << e.what() << '\n';
    return ExitCode::topology_error;
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << '\n';
    return ExitCode::io_error;
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << '\n';
    return ExitCode::io_error;
  }
}

void write_ensemble_outputs(const fs::path& dir, const ExperimentConfig& config, const EnsembleResult& r) {
  write_file(dir / "ensemble.csv", [&](std::ostream& o) { write_ensemble_csv(o, r.series); });
  write_file(dir / "summary.csv",
             [&](std::ostream& o) { o << summary_header() << '\n' << summary_row(config, r) << '\n'; });
  write_file(dir / "fits.csv", [&](std::ostream& o) { write_fits_csv(o, r.fits); });
  write_file(dir / "realizations.csv", [&](std::ostream& o) {
    o << "realization,n,k_measured,attempts,converged,t_c\n";
    for (std::size_t i = 0; i < r.t_c.size(); ++i)
      o << i << ',' << r.nodes[i] << ',' << format_double(r.k_measured[i]) << ',' << r.attempts[i] << ','
        << (r.t_c[i] ? 1 : 0) << ',' << (r.t_c[i] ? format_double(*r.t_c[i]) : "nan") << '\n';
  });
}

std::string fit_note(const char* name, const std::optional<FitResult>& f) {
  return std::string(name) + "=" + (f ? format_double(f->exponent) : "n/a");
}

}  // namespace

int cmd_gen_graph(const ExperimentConfig& config, const fs::path& out_file, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    Rng rng(derive_seed(config.master_seed, 0));
    const Realization r = build_graph(config, rng);
    write_file(out_file, [&](std::ostream& o) { write_graph(o, r.graph); });
    log << "n=" << r.graph.node_count() << " K=" << r.graph.edge_count()
        << " k_measured=" << format_double(measured_avg_degree(r.graph))
        << " components=" << connected_components(r.graph).count() << " attempts=" << r.attempts << '\n';
    return int{ExitCode::ok};
  });
}

int cmd_run(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    Rng rng(derive_seed(config.master_seed, 0));
    const Realization real = build_graph(config, rng);
    const Graph& g = real.graph;
    if (!config.snapshot_times.empty() && !g.is_spatial())
      throw ConfigError("snapshot.times requires a spatial topology (rgg or sw_rgg)");

    SeriesRecorder recorder(config.schedule());
    std::vector<std::vector<SnapshotRow>> snaps;
    const auto& wanted = config.snapshot_times;
    auto observer = [&](const SimState& state, const StepOutcome& outcome) {
      recorder.record(state, outcome);
      while (snaps.size() < wanted.size() && state.time() >= wanted[snaps.size()])
        snaps.push_back(take_snapshot(state, g));
    };
    RunResult result = run(g, config.mode, rng, observer, config.max_time);
    // Times never reached because consensus came first see the absorbed state.
    if (result.converged)
      while (snaps.size() < wanted.size()) snaps.push_back(take_snapshot(result.final_state, g));

    const RunSeries series = std::move(recorder).finish(g.node_count(), result.t_c);
    write_file(out_dir / "series.csv",
               [&](std::ostream& o) { write_ensemble_csv(o, aggregate(std::span(&series, 1))); });
    write_file(out_dir / "graph.txt", [&](std::ostream& o) { write_graph(o, g); });
    for (std::size_t i = 0; i < snaps.size(); ++i)
      write_file(out_dir / ("snapshot_" + std::to_string(i) + ".csv"),
                 [&](std::ostream& o) { write_snapshot(o, wanted[i], g, snaps[i]); });

    log << "n=" << g.node_count() << " K=" << g.edge_count()
        << " k_measured=" << format_double(measured_avg_degree(g)) << " inventions="
        << result.final_state.inventions();
    if (!result.converged) {
      log << " converged=0 t_max=" << format_double(result.final_state.time()) << '\n';
      return int{ExitCode::not_converged};
    }
    log << " converged=1 t_c=" << format_double(*result.t_c) << '\n';
    return int{ExitCode::ok};
  });
}

int cmd_ensemble(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const EnsembleResult r = run_ensemble(config);
    write_ensemble_outputs(out_dir, config, r);
    log << summary_header() << '\n' << summary_row(config, r) << '\n'
        << fit_note("slope_nw", r.fits.nw) << ' ' << fit_note("slope_nd", r.fits.nd) << ' '
        << fit_note("slope_1-s", r.fits.s) << '\n';
    return int{r.unconverged ? ExitCode::not_converged : ExitCode::ok};
  });
}

int cmd_sweep(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const SweepResult sweep = run_sweep(config);
    bool unconverged = false;
    write_file(out_dir / "sweep.csv", [&](std::ostream& o) {
      o << summary_header() << ",sw_onset\n";
      for (const auto& row : sweep.rows) {
        const double p = row.config.topology.shortcut_density;
        const bool onset = row.config.topology.kind == TopologyKind::sw_rgg && p > 0.0 &&
                           sw_onset_check(row.config.topology.n, p);
        o << summary_row(row.config, row.result) << ',' << (onset ? 1 : 0) << '\n';
      }
    });
    write_file(out_dir / "sweep_fit.csv", [&](std::ostream& o) {
      o << kFitHeader;
      write_fit_row(o, "mean_tc", sweep.mean_tc_fit);
      if (config.sweep_axis == SweepAxis::n) write_fit_row(o, "std_tc", sweep.std_tc_fit);
    });
    log << summary_header() << '\n';
    for (const auto& row : sweep.rows) {
      const std::string tag = std::string(to_string(config.sweep_axis)) + "_" + format_double(row.value);
      write_ensemble_outputs(out_dir / tag, row.config, row.result);
      log << summary_row(row.config, row.result) << '\n';
      unconverged = unconverged || row.result.unconverged > 0;
    }
    log << fit_note("tc_exponent", sweep.mean_tc_fit);
    if (config.sweep_axis == SweepAxis::n) log << ' ' << fit_note("std_tc_exponent", sweep.std_tc_fit);
    log << '\n';
    return int{unconverged ? ExitCode::not_converged : ExitCode::ok};
  });
}

}  // namespace ngsim
