#include "multicopy/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "multicopy/analytic.hpp"
#include "multicopy/fitkit.hpp"

namespace multicopy::montecarlo {

namespace {

double squeezed_variance(double r0, double dr) { return std::exp(-2.0 * (r0 + dr)); }

double inverse_sqrt(int n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

}  // namespace

void validate_config(const SweepConfig& config) {
  validate_spec(config.spec);
  validate_arch(config.arch);
  if (config.reps < 2) throw ValidationError("reps must be >= 2");
  if (config.n_grid.empty()) throw ValidationError("n_grid must not be empty");
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 2) throw ValidationError("n_grid entries must be >= 2");
    if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
      throw ValidationError("n_grid must be strictly increasing");
  }
  if (config.backend == Backend::ClosedForm && config.arch.loss_eta < 1.0)
    throw ValidationError("loss_eta < 1 requires the network backend");
  if (config.arch.kind == ArchKind::MeasurementInduced && config.spec.sigma_x0 > 0.0)
    throw ValidationError("sigma_x0 is not supported for measurement-induced architectures");
  if (config.x_m_policy.kind == XmPolicy::Kind::Fixed && !std::isfinite(config.x_m_policy.value))
    throw ValidationError("x_m must be finite");
}

std::vector<double> sample_deltas(int n, double sigma, rng::NormalStream& stream) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  stream.fill_normal(out, sigma);
  return out;
}

rng::NormalStream seed_for(std::uint64_t master_seed, std::string_view arch_tag, int n, int rep) {
  return rng::seed_for(master_seed, arch_tag, n, rep);
}

ShotEvaluator::ShotEvaluator(const SweepConfig& config, int n)
    : spec_(config.spec),
      arch_(config.arch),
      backend_(config.backend),
      master_seed_(config.master_seed),
      tag_(config.effective_stream_tag()),
      n_(n),
      x_m_(config.x_m_policy.resolve(config.spec.x0)) {
  if (n < 2) throw ValidationError("n must be >= 2");
  if (arch_.kind == ArchKind::FixedLoopOptimized) t_ = fitkit::optimize_transmittance(n).t_star;
  if (arch_.kind == ArchKind::FixedLoopRule) t_ = arch_.rule.at(n);
  scale_ = snr_scale(config);
  if (backend_ == Backend::Network) {
    // The optimized loop reuses the transmittance found above.
    ArchitectureSpec build_arch = arch_;
    if (arch_.kind == ArchKind::FixedLoopOptimized) {
      build_arch = ArchitectureSpec::loop_constant(t_).with_loss(arch_.loss_eta);
    }
    network_.emplace(netsim::build_network(build_arch, n, {.x_m = x_m_, .r0 = spec_.r0}));
  }
}

double ShotEvaluator::operator()(int rep) const { return scale_ * unit(rep); }

double ShotEvaluator::unit(int rep) const {
  rng::NormalStream stream = seed_for(master_seed_, tag_, n_, rep);
  return evaluate_unit(stream);
}

double ShotEvaluator::evaluate(rng::NormalStream& stream) const {
  return scale_ * evaluate_unit(stream);
}

double ShotEvaluator::evaluate_unit(rng::NormalStream& stream) const {
  std::vector<double> dr, dx, da, db;
  switch (arch_.kind) {
    case ArchKind::Classical:
      break;
    case ArchKind::MeasurementInduced:
      da = sample_deltas(n_, spec_.sigma_r, stream);
      db = sample_deltas(n_, spec_.sigma_r, stream);
      break;
    default:
      dr = sample_deltas(n_, spec_.sigma_r, stream);
      break;
  }
  if (spec_.sigma_x0 > 0.0) dx = sample_deltas(n_, spec_.sigma_x0, stream);
  return backend_ == Backend::ClosedForm ? closed_form(dr, dx, da, db) : network(dr, dx, da, db);
}

double ShotEvaluator::closed_form(std::span<const double> dr, std::span<const double> dx,
                                  std::span<const double> da, std::span<const double> db) const {
  const bool unit_scale = scale_ != 1.0;
  const double x0 = unit_scale ? 1.0 : spec_.x0;
  const double r0 = unit_scale ? 0.0 : spec_.r0;
  const bool signal_noise = !dx.empty();
  auto signal = [&](int i) { return signal_noise ? x0 + dx[i] : x0; };

  switch (arch_.kind) {
    case ArchKind::Classical: {
      if (!signal_noise) return analytic::snr_classical(n_, x0, spec_.sigma_thermal);
      double sum = 0.0;
      for (int i = 0; i < n_; ++i) sum += signal(i);
      const double var = 1.0 + spec_.sigma_thermal * spec_.sigma_thermal;
      return ModeState{sum * inverse_sqrt(n_), var}.snr();
    }
    case ArchKind::PyramidalEquivalent: {
      if (!signal_noise) return analytic::snr_multiport(x0, r0, dr);
      double sum = 0.0, var = 0.0;
      for (int i = 0; i < n_; ++i) {
        sum += signal(i);
        var += squeezed_variance(r0, dr[i]);
      }
      return ModeState{sum * inverse_sqrt(n_), var / n_}.snr();
    }
    case ArchKind::FixedLoopOptimized:
    case ArchKind::FixedLoopRule: {
      if (!signal_noise) return analytic::snr_fixed_loop(x0, r0, dr, t_);
      const std::vector<double> tau = analytic::tau_weights(t_, n_);
      double mean = 0.0, var = 0.0;
      for (int i = 0; i < n_; ++i) {
        mean += std::sqrt(tau[i]) * signal(i);
        var += tau[i] * squeezed_variance(r0, dr[i]);
      }
      return ModeState{mean, var}.snr();
    }
    case ArchKind::HarmonicMean: {
      if (!signal_noise) return analytic::snr_harmonic(x0, r0, dr);
      std::vector<ModeState> copies(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) copies[i] = {signal(i), squeezed_variance(r0, dr[i])};
      return analytic::combine_harmonic(copies).snr();
    }
    case ArchKind::MeasurementInduced: {
      std::vector<ModeState> copies(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        const auto c = arch_.mode == MeasurementMode::Conditional
                           ? analytic::measurement_induced_copy(x_m_, r0, da[i], db[i])
                           : analytic::feedforward_copy(x_m_, r0, da[i], db[i]);
        copies[i] = {c.displacement, c.variance};
      }
      const std::vector<double> weights(static_cast<std::size_t>(n_), inverse_sqrt(n_));
      return analytic::combine_linear(weights, copies).snr();
    }
  }
  throw ValidationError("unsupported architecture");
}

double ShotEvaluator::network(std::span<const double> dr, std::span<const double> dx,
                              std::span<const double> da, std::span<const double> db) const {
  const double x0 = spec_.x0;
  const double r0 = spec_.r0;
  auto signal = [&](int i) { return dx.empty() ? x0 : x0 + dx[i]; };
  std::vector<ModeState> inputs;

  switch (arch_.kind) {
    case ArchKind::Classical: {
      const double var = 1.0 + spec_.sigma_thermal * spec_.sigma_thermal;
      for (int i = 0; i < n_; ++i) inputs.push_back({signal(i), var});
      return netsim::propagate(*network_, inputs).snr();
    }
    case ArchKind::MeasurementInduced: {
      for (int i = 0; i < n_; ++i) inputs.push_back({0.0, squeezed_variance(r0, da[i])});
      for (int i = 0; i < n_; ++i) inputs.push_back({0.0, 1.0 / squeezed_variance(r0, db[i])});
      if (arch_.mode == MeasurementMode::Conditional) {
        return netsim::propagate_conditional(*network_, inputs,
                                             netsim::ConditionalProtocol::MeasurementInduced, x_m_)
            .snr();
      }
      return netsim::propagate(*network_, inputs).snr();
    }
    default:
      break;
  }
  for (int i = 0; i < n_; ++i) inputs.push_back({signal(i), squeezed_variance(r0, dr[i])});
  if (arch_.kind == ArchKind::HarmonicMean) {
    return netsim::propagate_conditional(*network_, inputs, netsim::ConditionalProtocol::Harmonic)
        .snr();
  }
  return netsim::propagate(*network_, inputs).snr();
}

double snr_shot(const SweepConfig& config, int n, int rep) {
  validate_config(config);
  return ShotEvaluator(config, n)(rep);
}

double snr_scale(const SweepConfig& config) {
  if (config.backend != Backend::ClosedForm || config.spec.sigma_x0 > 0.0 || !(config.spec.x0 > 0.0))
    return 1.0;
  switch (config.arch.kind) {
    case ArchKind::PyramidalEquivalent:
    case ArchKind::FixedLoopOptimized:
    case ArchKind::FixedLoopRule:
    case ArchKind::HarmonicMean:
      return config.spec.x0 * std::exp(config.spec.r0);
    default:
      return 1.0;
  }
}

SnrStats summarize(const SweepConfig& config, int n, std::span<const double> snrs) {
  return summarize_scaled(config, n, snrs, 1.0);
}

SnrStats summarize_scaled(const SweepConfig& config, int n, std::span<const double> snrs,
                          double scale) {
  const auto count = static_cast<double>(snrs.size());
  if (snrs.size() < 2) throw ValidationError("reps must be >= 2");
  double mean = 0.0;
  for (double v : snrs) mean += v;
  mean /= count;
  // Constant samples: exact mean, zero spread.
  if (std::all_of(snrs.begin(), snrs.end(), [&](double v) { return v == snrs[0]; }))
    mean = snrs[0];
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : snrs) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double variance = m2 / (count - 1.0);
  m3 /= count;
  m4 /= count;

  SnrStats s;
  s.n_copies = n;
  s.reps = static_cast<int>(snrs.size());
  s.seed = config.master_seed;
  const double sd = std::sqrt(variance);
  s.mean_snr = scale * mean;
  s.std_snr = scale * sd;
  s.gir = gain_to_instability(mean, sd);
  s.mean_stderr = s.std_snr / std::sqrt(count);
  if (sd > 0.0) {
    // Delta method for mean / std from the first four sample moments.
    const double var_mean = variance / count;
    const double var_sd = std::max(m4 - variance * variance, 0.0) / (4.0 * variance * count);
    const double cov = m3 / (2.0 * sd * count);
    const double g = mean / sd;
    s.gir_stderr = std::sqrt(std::max(
        var_mean / variance + g * g * var_sd / variance - 2.0 * g * cov / variance, 0.0));
  }

  const InputEnsembleSpec& spec = config.spec;
  if (spec.x0 > 0.0) {
    if (config.arch.kind == ArchKind::Classical) {
      s.nf = s.mean_snr / analytic::snr_classical(1, spec.x0, spec.sigma_thermal);
    } else {
      s.nf = analytic::noise_figure(s.mean_snr, spec.x0, spec.r0);
    }
  } else {
    s.nf = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

namespace {

std::vector<ShotEvaluator> make_evaluators(const SweepConfig& config) {
  validate_config(config);
  std::vector<ShotEvaluator> evals;
  evals.reserve(config.n_grid.size());
  for (int n : config.n_grid) evals.emplace_back(config, n);
  return evals;
}

std::vector<SnrStats> summarize_all(const SweepConfig& config,
                                    const std::vector<std::vector<double>>& samples) {
  const double scale = snr_scale(config);
  std::vector<SnrStats> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    out.push_back(summarize_scaled(config, config.n_grid[k], samples[k], scale));
  return out;
}

std::vector<std::vector<double>> sample_units(const std::vector<ShotEvaluator>& evals, int reps,
                                              int workers) {
  std::vector<std::vector<double>> samples(evals.size(), std::vector<double>(reps));
  const long long total = static_cast<long long>(evals.size()) * reps;
  const int threads = workers > 0 ? workers : omp_get_max_threads();

  // Exceptions may not escape an OpenMP region; keep the first one.
  std::string error;
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long task = 0; task < total; ++task) {
    const auto k = static_cast<std::size_t>(task / reps);
    const int rep = static_cast<int>(task % reps);
    try {
      samples[k][rep] = evals[k].unit(rep);
    } catch (const std::exception& e) {
#pragma omp critical(multicopy_sweep_error)
      {
        if (!failed) {
          failed = true;
          error = e.what();
        }
      }
    }
  }
  if (failed) throw ValidationError(error);
  return samples;
}

}  // namespace

std::vector<std::vector<double>> sample_sweep(const SweepConfig& config, int workers) {
  auto samples = sample_units(make_evaluators(config), config.reps, workers);
  const double scale = snr_scale(config);
  for (auto& row : samples)
    for (double& v : row) v *= scale;
  return samples;
}

std::vector<SnrStats> run_sweep(const SweepConfig& config, int workers) {
  return summarize_all(config, sample_units(make_evaluators(config), config.reps, workers));
}

std::vector<SnrStats> run_sweep_serial(const SweepConfig& config) {
  const std::vector<ShotEvaluator> evals = make_evaluators(config);
  std::vector<std::vector<double>> samples(evals.size());
  for (std::size_t k = 0; k < evals.size(); ++k) {
    samples[k].reserve(config.reps);
    for (int rep = 0; rep < config.reps; ++rep) samples[k].push_back(evals[k].unit(rep));
  }
  return summarize_all(config, samples);
}

}  // namespace multicopy::montecarlo
