// Scaling of the lossy pyramid: mean SNR(N) ~ N^b through Loss(eta)
// channels in front of every beam splitter.
#pragma once

#include <cstdint>
#include <vector>

#include "multicopy/core.hpp"

namespace multicopy::netsim {

struct LossScanOptions {
  int reps = 2000;
  std::uint64_t master_seed = 0;
  int workers = 0;
};

struct LossScan {
  double eta = 1.0;
  PowerLawFit fit;
  /// Large-N exponent of the mean path, (1 + log2 eta) / 2.
  double predicted_b = 0.5;
  std::vector<SnrStats> stats;
};

/// Sweeps the lossy pyramid (network backend) over `n_grid` (powers of two,
/// >= 4, at least 3 points) and fits its mean SNR.
LossScan loss_scaling_exponent(double eta, const std::vector<int>& n_grid,
                               const InputEnsembleSpec& spec, const LossScanOptions& options = {});

double predicted_loss_exponent(double eta);

}  // namespace multicopy::netsim
