#include "ngsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ngsim/errors.hpp"

namespace ngsim {

FitResult fit_power_law(std::span<const double> x, std::span<const double> y, FitWindow window) {
  if (x.size() != y.size()) throw FitError("fit_power_law: x and y differ in length");
  if (!(window.lo < window.hi)) throw FitError("fit_power_law: empty window");

  std::size_t m = 0;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0) || x[i] < window.lo || x[i] > window.hi) continue;
    sx += std::log(x[i]);
    sy += std::log(y[i]);
    ++m;
  }
  if (m < 2) throw FitError("fit_power_law: " + std::to_string(m) + " usable point(s), need 2");
  const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0) || x[i] < window.lo || x[i] > window.hi) continue;
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw FitError("fit_power_law: no spread in ln x");

  FitResult r;
  r.exponent = sxy / sxx;
  r.amplitude = std::exp(my - r.exponent * mx);
  r.window = window;
  r.point_count = m;
  const double ss_res = syy - r.exponent * sxy;
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return r;
}

ScalingPrediction::ScalingPrediction(double gamma, int dimension) : gamma_(gamma), d_(dimension) {
  if (!(gamma > 0.0) || dimension < 1) throw ParameterError("scaling prediction needs gamma > 0, d >= 1");
}

ScalingPrediction predict_scaling(double gamma, int dimension) { return {gamma, dimension}; }

double predict_crossover(double p, double gamma, int dimension) {
  if (!(p > 0.0)) throw ParameterError("predict_crossover: p must be positive");
  return std::pow(p, -predict_scaling(gamma, dimension).tc_exponent());
}

bool sw_onset_check(std::size_t n, double p, double threshold) {
  if (n < 1 || !(p > 0.0)) throw ParameterError("sw_onset_check: need n >= 1 and p > 0");
  return static_cast<double>(n) * p >= threshold;
}

}  // namespace ngsim
