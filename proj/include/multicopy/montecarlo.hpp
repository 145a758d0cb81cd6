// Seeded Monte Carlo estimation of <SNR>, std(SNR), GIR and NF per N.
//
// Each shot (N, rep) draws its fluctuations from its own counter-based
// stream, so `run_sweep` (OpenMP) and `run_sweep_serial` (reference) produce
// bit-identical results at any worker count.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multicopy/core.hpp"
#include "multicopy/netsim.hpp"
#include "multicopy/rng.hpp"

namespace multicopy::montecarlo {

enum class Backend { ClosedForm, Network };

/// Homodyne outcome used by the measurement-induced architectures.
struct XmPolicy {
  enum class Kind { EqualsX0, Fixed };
  Kind kind = Kind::EqualsX0;
  double value = 0.0;

  double resolve(double x0) const { return kind == Kind::EqualsX0 ? x0 : value; }
  bool operator==(const XmPolicy&) const = default;
};

struct SweepConfig {
  InputEnsembleSpec spec{};
  ArchitectureSpec arch{};
  std::vector<int> n_grid;
  int reps = 100;
  std::uint64_t master_seed = 0;
  Backend backend = Backend::ClosedForm;
  XmPolicy x_m_policy{};
  /// Seeds streams; empty means arch.tag(). Two sweeps with the same tag
  /// and seed share their random draws.
  std::string stream_tag;

  std::string effective_stream_tag() const {
    return stream_tag.empty() ? arch.tag() : stream_tag;
  }
};

/// Throws ValidationError naming the offending field.
void validate_config(const SweepConfig& config);

/// n independent N(0, sigma^2) draws from `stream`.
std::vector<double> sample_deltas(int n, double sigma, rng::NormalStream& stream);

/// Stream of shot (n, rep).
rng::NormalStream seed_for(std::uint64_t master_seed, std::string_view arch_tag, int n, int rep);

/// Per-N precomputation (transmittance, weights, network). Evaluating a shot
/// is const and safe to call concurrently.
class ShotEvaluator {
 public:
  ShotEvaluator(const SweepConfig& config, int n);

  int n_copies() const { return n_; }
  double operator()(int rep) const;

  /// SNR of shot `rep` divided by snr_scale(config).
  double unit(int rep) const;

  /// Evaluates with an explicit stream rather than the seeded one.
  double evaluate(rng::NormalStream& stream) const;
  double evaluate_unit(rng::NormalStream& stream) const;

 private:
  double closed_form(std::span<const double> dr, std::span<const double> dx,
                     std::span<const double> da, std::span<const double> db) const;
  double network(std::span<const double> dr, std::span<const double> dx,
                 std::span<const double> da, std::span<const double> db) const;

  InputEnsembleSpec spec_;
  ArchitectureSpec arch_;
  Backend backend_;
  std::uint64_t master_seed_;
  std::string tag_;
  int n_;
  double t_ = 0.5;
  double scale_ = 1.0;
  double x_m_ = 0.0;
  std::optional<netsim::Network> network_;
};

/// One realization of the SNR for N = n, repetition rep.
double snr_shot(const SweepConfig& config, int n, int rep);

/// x0 e^{r0} when the closed-form SNR is exactly proportional to it
/// (pyramid-equivalent, loop and harmonic kinds without signal noise), else 1.
/// Sweeps sample SNR / scale, so GIR columns do not depend on x0 and r0.
double snr_scale(const SweepConfig& config);

/// Sample statistics of one N; `snrs` in repetition order.
SnrStats summarize(const SweepConfig& config, int n, std::span<const double> snrs);

/// As summarize, for samples already divided by `scale`.
SnrStats summarize_scaled(const SweepConfig& config, int n, std::span<const double> snrs,
                          double scale);

/// OpenMP sweep. workers <= 0 uses the OpenMP default.
std::vector<SnrStats> run_sweep(const SweepConfig& config, int workers = 0);

/// Single-threaded reference implementation of run_sweep.
std::vector<SnrStats> run_sweep_serial(const SweepConfig& config);

/// Raw SNR samples [n index][rep] computed in parallel; exposed for tests
/// and for estimators that need more than the summary statistics.
std::vector<std::vector<double>> sample_sweep(const SweepConfig& config, int workers = 0);

}  // namespace multicopy::montecarlo
