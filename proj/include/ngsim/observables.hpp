#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ngsim/dynamics.hpp"

namespace ngsim {

enum class Spacing { logarithmic, linear };

/// Strictly increasing sample times with grid[0] > 0.
struct SampleSchedule {
  std::vector<double> grid;
  Spacing spacing = Spacing::logarithmic;
  int points_per_decade = 0;

  /// t_min * 10^(k / points_per_decade) up to t_max, with t_max appended
  /// if the last decade point falls short of it.
  static SampleSchedule logarithmic(double t_min, double t_max, int points_per_decade = 20);
  /// t_min, t_min + dt, ... up to t_max (appended if not hit).
  static SampleSchedule linear(double t_min, double t_max, double dt);
};

struct StateSummary {
  double t = 0.0;
  std::uint64_t n_w = 0;
  std::uint64_t n_d = 0;
};

/// Sample at one grid time. `s` is the listener-weighted success rate over
/// all events in the bin (previous grid time, t]; absent if the bin saw no
/// listeners.
struct TimeSeriesPoint {
  double t = 0.0;
  std::uint64_t n_w = 0;
  std::uint64_t n_d = 0;
  std::optional<double> s;
};

struct RunSeries {
  std::vector<TimeSeriesPoint> points;
  std::size_t n = 0;
  std::optional<double> t_c;
};

/// Observer for run(): bins step outcomes onto a SampleSchedule.
class SeriesRecorder {
 public:
  explicit SeriesRecorder(SampleSchedule schedule);

  /// Events must arrive with nondecreasing t; otherwise std::logic_error.
  void record(const StateSummary& summary, const StepOutcome& outcome);
  void record(const SimState& state, const StepOutcome& outcome);
  void operator()(const SimState& state, const StepOutcome& outcome) { record(state, outcome); }

  /// Closes the open bin and fills the rest of the grid. Converged runs are
  /// extended with their absorbing values n_w = n, n_d = 1, s = 1.
  RunSeries finish(std::size_t n, std::optional<double> t_c) &&;

  const SampleSchedule& schedule() const noexcept { return schedule_; }
  std::size_t emitted() const noexcept { return points_.size(); }

 private:
  void emit_until(double t);
  void emit_current();

  SampleSchedule schedule_;
  std::vector<TimeSeriesPoint> points_;
  StateSummary last_;
  std::uint64_t bin_listeners_ = 0;
  std::uint64_t bin_successes_ = 0;
};

struct EnsemblePoint {
  double t = 0.0;
  double nw_mean = 0.0, nw_std = 0.0;
  double nd_mean = 0.0, nd_std = 0.0;
  /// Over the runs whose bin had listeners; NaN if none did.
  double s_mean = 0.0, s_std = 0.0;
  std::size_t s_samples = 0;
};

struct EnsembleSeries {
  std::vector<EnsemblePoint> points;
  std::size_t run_count = 0;
};

/// Pointwise sample mean and standard deviation (divisor run_count - 1;
/// reported as 0 for a single run). All runs must share the same grid.
EnsembleSeries aggregate(std::span<const RunSeries> runs);

struct ConvergenceStats {
  double mean_tc = 0.0;
  double std_tc = 0.0;
  std::size_t run_count = 0;
  std::size_t unconverged_count = 0;
};

ConvergenceStats convergence_stats(std::span<const double> t_c, std::size_t unconverged);

}  // namespace ngsim
