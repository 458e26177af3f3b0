#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ngsim/analysis.hpp"
#include "ngsim/dynamics.hpp"
#include "ngsim/observables.hpp"
#include "ngsim/topology.hpp"

namespace ngsim {

enum class TopologyKind { rgg, sw_rgg, lattice2d, complete };
enum class ConnectivityPolicy { regenerate, giant_component };
enum class SweepAxis { none, n, p };

const char* to_string(TopologyKind k);
const char* to_string(ConnectivityPolicy c);
const char* to_string(SweepAxis a);

struct TopologyParams {
  TopologyKind kind = TopologyKind::rgg;
  std::size_t n = 1024;
  std::optional<double> avg_degree = 12.0;  ///< target k for rgg / sw_rgg
  std::optional<double> radius;      ///< alternative to avg_degree
  std::optional<double> box_length;  ///< overrides density when set
  double density = 1.0;              ///< nodes per unit area
  Boundary boundary = Boundary::periodic;
  double shortcut_density = 0.0;     ///< sw_rgg only
  bool periodic = true;              ///< lattice2d only
  ConnectivityPolicy connectivity = ConnectivityPolicy::regenerate;
};

/// Every knob of an experiment. Populated from presets, flat key=value
/// files (`topology.n=1024`) and command-line overrides, in that order.
struct ExperimentConfig {
  TopologyParams topology;
  InteractionMode mode = InteractionMode::broadcast;
  std::size_t runs = 1;
  double max_time = 1e5;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  Spacing spacing = Spacing::logarithmic;
  double t_min = 0.1;
  int points_per_decade = 20;
  double linear_dt = 1.0;

  std::vector<double> snapshot_times;

  FitWindow fit_nw{3.0, 30.0};
  FitWindow fit_nd{3.0, 30.0};
  FitWindow fit_s{3.0, 30.0};
  std::optional<FitWindow> fit_tc;  ///< defaults to the full sweep range

  SweepAxis sweep_axis = SweepAxis::none;
  std::vector<double> sweep_values;

  /// Applies one `key=value` setting. Throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Applies every non-blank, non-# line of a key=value text.
  void apply_text(const std::string& text);
  /// Cross-field checks; throws ConfigError.
  void validate() const;

  SampleSchedule schedule() const;
  /// Edge length of the box for the current n.
  double box_length() const;
  /// Nominal mean degree the topology is built for.
  double target_degree() const;
};

/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// key=value text of a preset; throws ConfigError for unknown names.
const std::string& preset_text(const std::string& name);

ExperimentConfig load_config(const std::optional<std::string>& preset,
                             const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides);

struct Realization {
  Graph graph;
  int attempts = 1;
};

/// One graph drawn according to the topology parameters and connectivity policy.
Realization build_graph(const ExperimentConfig& config, Rng& rng);

struct EnsembleFits {
  std::optional<FitResult> nw;  ///< N_w / N - 1
  std::optional<FitResult> nd;  ///< N_d / N
  std::optional<FitResult> s;   ///< 1 - S
};

struct EnsembleResult {
  EnsembleSeries series;
  std::vector<std::optional<double>> t_c;  ///< per realization, in index order
  std::vector<double> k_measured;
  std::vector<std::size_t> nodes;
  std::vector<int> attempts;
  std::optional<ConvergenceStats> stats;
  std::size_t unconverged = 0;
  double k_measured_mean = 0.0;
  double n_mean = 0.0;
  EnsembleFits fits;
};

/// Runs config.runs realizations (fresh graph each for random topologies),
/// realization i seeded with derive_seed(master_seed, i), merged in index order.
EnsembleResult run_ensemble(const ExperimentConfig& config);

EnsembleFits fit_ensemble(const EnsembleSeries& series, double n, const ExperimentConfig& config);

struct SweepRow {
  double value = 0.0;
  ExperimentConfig config;
  EnsembleResult result;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<FitResult> mean_tc_fit;
  std::optional<FitResult> std_tc_fit;  ///< n-sweeps only
};

SweepResult run_sweep(const ExperimentConfig& config);

// File formats.
void write_ensemble_csv(std::ostream& out, const EnsembleSeries& series);
std::string summary_header();
std::string summary_row(const ExperimentConfig& config, const EnsembleResult& result);
void write_fits_csv(std::ostream& out, const EnsembleFits& fits);

struct SnapshotRow {
  NodeId id = 0;
  Point2D pos;
  std::size_t vocab_size = 0;
  std::int64_t word = -1;
};

std::vector<SnapshotRow> take_snapshot(const SimState& state, const Graph& g);
void write_snapshot(std::ostream& out, double requested_t, const Graph& g,
                    const std::vector<SnapshotRow>& rows);

// Commands. Each writes its files below `out` and a short report to `log`.
enum ExitCode : int { ok = 0, config_error = 2, topology_error = 3, not_converged = 4, io_error = 5 };

int cmd_gen_graph(const ExperimentConfig& config, const std::filesystem::path& out_file, std::ostream& log);
int cmd_run(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_ensemble(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace ngsim
