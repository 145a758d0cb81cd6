#include "multicopy/loss_scan.hpp"

#include <cmath>
#include <string>

#include "multicopy/fitkit.hpp"
#include "multicopy/montecarlo.hpp"
#include "multicopy/netsim.hpp"

namespace multicopy::netsim {

double predicted_loss_exponent(double eta) { return 0.5 * (1.0 + std::log2(eta)); }

LossScan loss_scaling_exponent(double eta, const std::vector<int>& n_grid,
                               const InputEnsembleSpec& spec, const LossScanOptions& options) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in (0, 1]");
  if (n_grid.size() < 3) throw ValidationError("loss scan needs at least 3 grid points");
  for (int n : n_grid) {
    if (n < 4 || !is_power_of_two(n))
      throw ValidationError("loss scan grid entries must be powers of two >= 4, got " +
                            std::to_string(n));
  }

  montecarlo::SweepConfig config;
  config.spec = spec;
  config.arch = ArchitectureSpec::pyramidal().with_loss(eta);
  config.n_grid = n_grid;
  config.reps = options.reps;
  config.master_seed = options.master_seed;
  config.backend = montecarlo::Backend::Network;

  LossScan scan;
  scan.eta = eta;
  scan.predicted_b = predicted_loss_exponent(eta);
  scan.stats = montecarlo::run_sweep(config, options.workers);
  scan.fit = fitkit::fit_stats(scan.stats, &SnrStats::mean_snr, n_grid.front(), n_grid.back());
  return scan;
}

}  // namespace multicopy::netsim
