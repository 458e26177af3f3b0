#pragma once

#include <span>
#include <utility>

namespace ngsim {

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// y ~ amplitude * x^exponent, fitted by least squares on (ln x, ln y).
struct FitResult {
  double exponent = 0.0;
  double amplitude = 0.0;
  FitWindow window;
  double r_squared = 0.0;
  std::size_t point_count = 0;
};

/// Uses only points with x in [lo, hi] and x, y > 0; others are skipped,
/// not clipped. Throws FitError with fewer than two usable points or when
/// all usable x coincide.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y, FitWindow window);

/// Late-time slopes implied by a coarsening length xi(t) ~ t^gamma in d dimensions.
class ScalingPrediction {
 public:
  ScalingPrediction(double gamma, int dimension);

  double gamma() const noexcept { return gamma_; }
  int dimension() const noexcept { return d_; }

  /// N_d / N ~ t^(-d gamma)
  double nd_slope() const noexcept { return -d_ * gamma_; }
  /// N_w / N - 1 ~ t^(-gamma)
  double nw_slope() const noexcept { return -gamma_; }
  /// 1 - S ~ t^(-gamma)
  double failure_slope() const noexcept { return -gamma_; }
  /// t_c ~ N^(1 / (d gamma))
  double tc_exponent() const noexcept { return 1.0 / (d_ * gamma_); }

 private:
  double gamma_;
  int d_;
};

ScalingPrediction predict_scaling(double gamma, int dimension);

/// Order-of-magnitude time at which domains reach the shortcut spacing,
/// p^(-1/(d gamma)) with unit amplitude.
double predict_crossover(double p, double gamma, int dimension);

/// Whether n*p is large enough (>= threshold) for shortcuts to matter.
bool sw_onset_check(std::size_t n, double p, double threshold = 10.0);

}  // namespace ngsim
