#include "multicopy/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "multicopy/analytic.hpp"

namespace multicopy::fitkit {

PowerLawFit fit_power_law(std::span<const FitPoint> points) {
  if (points.size() < 2) throw ValidationError("power-law fit needs at least 2 points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const FitPoint& p : points) {
    if (!(p.y > 0.0) || !std::isfinite(p.y))
      throw ValidationError("power-law fit needs finite y > 0");
    if (!(p.n > 0.0)) throw ValidationError("power-law fit needs n > 0");
    xs.push_back(std::log(p.n));
    ys.push_back(std::log(p.y));
  }
  {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("power-law fit needs distinct n");
  }

  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  return {.a = std::exp(intercept),
          .b = slope,
          .rms_log_residual = std::sqrt(ss / count),
          .n_points = static_cast<int>(xs.size())};
}

PowerLawFit fit_stats(std::span<const SnrStats> stats, double SnrStats::*value, int n_min,
                      int n_max) {
  if (n_max < n_min) throw ValidationError("n_max < n_min");
  std::vector<FitPoint> points;
  for (const SnrStats& s : stats) {
    if (s.n_copies >= n_min && s.n_copies <= n_max)
      points.push_back({static_cast<double>(s.n_copies), s.*value});
  }
  return fit_power_law(points);
}

TransmittanceOptimum optimize_transmittance(int n) {
  if (n < 2) throw ValidationError("optimize_transmittance needs n >= 2");
  const double root_n = std::sqrt(static_cast<double>(n));
  if (n == 2) {
    // sqrt(t) + sqrt(1 - t) is symmetric about 1/2.
    return {0.5, analytic::displacement_objective(0.5, 2) / root_n};
  }

  // Coarse bracket: the objective is unimodal on (0, 1) and its maximizer
  // sits near 1 - 2.5/n, so the grid is refined towards t = 1.
  constexpr int kGrid = 2000;
  const double u_min = std::min(1e-6, 0.01 / n);
  std::vector<double> grid;
  grid.reserve(kGrid + 1);
  for (int k = 0; k <= kGrid; ++k) {
    // u = 1 - t, log-spaced from 1 - 1e-6 down to u_min.
    const double frac = static_cast<double>(k) / kGrid;
    grid.push_back(1.0 - std::exp(std::log(1.0 - 1e-6) * (1.0 - frac) + std::log(u_min) * frac));
  }
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = analytic::displacement_objective(grid[k], n);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = best == 0 ? 1e-12 : grid[best - 1];
  double hi = best + 1 == grid.size() ? 1.0 - 1e-15 : grid[best + 1];

  auto slope = [n](double t) { return analytic::displacement_objective_derivative(t, n); };
  double t_star = grid[best];
  const double f_lo = slope(lo);
  const double f_hi = slope(hi);
  if (f_lo > 0.0 && f_hi < 0.0) {
    boost::uintmax_t max_iter = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
    const auto [a, b] = boost::math::tools::toms748_solve(slope, lo, hi, f_lo, f_hi, tol, max_iter);
    t_star = 0.5 * (a + b);
  }
  return {t_star, analytic::displacement_objective(t_star, n) / root_n};
}

std::vector<int> log_spaced_grid(int n_min, int n_max, int count) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("invalid grid range");
  if (count < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<int> out;
  const double lo = std::log(static_cast<double>(n_min));
  const double hi = std::log(static_cast<double>(n_max));
  for (int k = 0; k < count; ++k) {
    const int v = static_cast<int>(std::lround(std::exp(lo + (hi - lo) * k / (count - 1))));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  out.back() = n_max;
  return out;
}

}  // namespace multicopy::fitkit
