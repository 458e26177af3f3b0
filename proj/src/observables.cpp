#include "ngsim/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ngsim/errors.hpp"

namespace ngsim {

SampleSchedule SampleSchedule::logarithmic(double t_min, double t_max, int points_per_decade) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || points_per_decade < 1)
    throw ParameterError("logarithmic schedule needs 0 < t_min <= t_max and points_per_decade >= 1");
  SampleSchedule s;
  s.spacing = Spacing::logarithmic;
  s.points_per_decade = points_per_decade;
  for (int k = 0;; ++k) {
    const double t = t_min * std::pow(10.0, static_cast<double>(k) / points_per_decade);
    if (t > t_max * (1.0 + 1e-12)) break;
    s.grid.push_back(std::min(t, t_max));
  }
  if (s.grid.back() < t_max) s.grid.push_back(t_max);
  return s;
}

SampleSchedule SampleSchedule::linear(double t_min, double t_max, double dt) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !(dt > 0.0))
    throw ParameterError("linear schedule needs 0 < t_min <= t_max and dt > 0");
  SampleSchedule s;
  s.spacing = Spacing::linear;
  for (std::size_t k = 0;; ++k) {
    const double t = t_min + static_cast<double>(k) * dt;
    if (t > t_max * (1.0 + 1e-12)) break;
    s.grid.push_back(std::min(t, t_max));
  }
  if (s.grid.back() < t_max) s.grid.push_back(t_max);
  return s;
}

SeriesRecorder::SeriesRecorder(SampleSchedule schedule) : schedule_(std::move(schedule)) {
  if (schedule_.grid.empty() || !(schedule_.grid.front() > 0.0))
    throw ParameterError("schedule must be non-empty and start after t = 0");
  for (std::size_t i = 1; i < schedule_.grid.size(); ++i)
    if (!(schedule_.grid[i] > schedule_.grid[i - 1]))
      throw ParameterError("schedule must be strictly increasing");
  points_.reserve(schedule_.grid.size());
}

void SeriesRecorder::emit_current() {
  TimeSeriesPoint p;
  p.t = schedule_.grid[points_.size()];
  p.n_w = last_.n_w;
  p.n_d = last_.n_d;
  if (bin_listeners_ > 0)
    p.s = static_cast<double>(bin_successes_) / static_cast<double>(bin_listeners_);
  points_.push_back(p);
  bin_listeners_ = 0;
  bin_successes_ = 0;
}

// Emits every grid point strictly before t; they close with the state as it
// was after the previous event.
void SeriesRecorder::emit_until(double t) {
  while (points_.size() < schedule_.grid.size() && t > schedule_.grid[points_.size()]) emit_current();
}

void SeriesRecorder::record(const StateSummary& summary, const StepOutcome& outcome) {
  if (summary.t < last_.t) throw std::logic_error("SeriesRecorder: events out of time order");
  emit_until(summary.t);
  bin_listeners_ += outcome.listener_count;
  bin_successes_ += outcome.success_count;
  last_ = summary;
}

void SeriesRecorder::record(const SimState& state, const StepOutcome& outcome) {
  record(StateSummary{state.time(), state.total_words(), state.distinct_words()}, outcome);
}

RunSeries SeriesRecorder::finish(std::size_t n, std::optional<double> t_c) && {
  const std::size_t size = schedule_.grid.size();
  if (t_c) {
    if (points_.size() < size) emit_current();
    while (points_.size() < size) points_.push_back({schedule_.grid[points_.size()], n, 1, 1.0});
  } else {
    // Grid points reached by the clock close normally; any beyond the last
    // event keep the final state with no success sample.
    while (points_.size() < size && schedule_.grid[points_.size()] <= last_.t) emit_current();
    while (points_.size() < size) emit_current();
  }
  return RunSeries{std::move(points_), n, t_c};
}

namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

template <class Get>
Moments moments(std::span<const RunSeries> runs, std::size_t i, Get get) {
  double sum = 0.0;
  for (const auto& r : runs) sum += get(r.points[i]);
  const double mean = sum / static_cast<double>(runs.size());
  if (runs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& r : runs) {
    const double d = get(r.points[i]) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(runs.size() - 1))};
}

}  // namespace

EnsembleSeries aggregate(std::span<const RunSeries> runs) {
  if (runs.empty()) throw ParameterError("aggregate: no runs");
  const std::size_t size = runs.front().points.size();
  for (const auto& r : runs) {
    if (r.points.size() != size) throw ParameterError("aggregate: runs do not share a grid");
    for (std::size_t i = 0; i < size; ++i)
      if (r.points[i].t != runs.front().points[i].t)
        throw ParameterError("aggregate: runs do not share a grid");
  }

  EnsembleSeries out;
  out.run_count = runs.size();
  out.points.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    EnsemblePoint& p = out.points[i];
    p.t = runs.front().points[i].t;
    auto nw = moments(runs, i, [](const TimeSeriesPoint& q) { return static_cast<double>(q.n_w); });
    auto nd = moments(runs, i, [](const TimeSeriesPoint& q) { return static_cast<double>(q.n_d); });
    p.nw_mean = nw.mean;
    p.nw_std = nw.std;
    p.nd_mean = nd.mean;
    p.nd_std = nd.std;

    double sum = 0.0;
    for (const auto& r : runs)
      if (r.points[i].s) {
        sum += *r.points[i].s;
        ++p.s_samples;
      }
    if (p.s_samples == 0) {
      p.s_mean = p.s_std = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    p.s_mean = sum / static_cast<double>(p.s_samples);
    if (p.s_samples > 1) {
      double ss = 0.0;
      for (const auto& r : runs)
        if (r.points[i].s) ss += (*r.points[i].s - p.s_mean) * (*r.points[i].s - p.s_mean);
      p.s_std = std::sqrt(ss / static_cast<double>(p.s_samples - 1));
    }
  }
  return out;
}

ConvergenceStats convergence_stats(std::span<const double> t_c, std::size_t unconverged) {
  if (t_c.empty()) throw ParameterError("convergence_stats: no converged runs");
  ConvergenceStats out;
  out.run_count = t_c.size();
  out.unconverged_count = unconverged;
  double sum = 0.0;
  for (double t : t_c) sum += t;
  out.mean_tc = sum / static_cast<double>(t_c.size());
  if (t_c.size() > 1) {
    double ss = 0.0;
    for (double t : t_c) ss += (t - out.mean_tc) * (t - out.mean_tc);
    out.std_tc = std::sqrt(ss / static_cast<double>(t_c.size() - 1));
  }
  return out;
}

}  // namespace ngsim
