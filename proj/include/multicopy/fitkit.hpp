// Power-law fitting and fixed-loop transmittance optimization.
#pragma once

#include <span>
#include <vector>

#include "multicopy/core.hpp"

namespace multicopy::fitkit {

struct FitPoint {
  double n;
  double y;
};

/// Ordinary least squares of ln y on ln n. Requires >= 2 points, distinct n
/// and y > 0.
PowerLawFit fit_power_law(std::span<const FitPoint> points);

/// Fits one column of sweep output restricted to n_min <= N <= n_max.
/// `value` selects the column, e.g. &SnrStats::mean_snr.
PowerLawFit fit_stats(std::span<const SnrStats> stats, double SnrStats::*value, int n_min,
                      int n_max);

struct TransmittanceOptimum {
  double t_star = 0.5;
  double displacement_ratio = 0.0;  // objective(t*) / sqrt(n)
};

/// argmax over t in (0,1) of the fixed-loop mean displacement, to |dt| <= 1e-10.
TransmittanceOptimum optimize_transmittance(int n);

/// `count` log-spaced integers in [n_min, n_max], rounded and de-duplicated.
std::vector<int> log_spaced_grid(int n_min, int n_max, int count);

}  // namespace multicopy::fitkit
