// Shared domain types for the multicopy interference toolkit.
//
// Units: x-quadrature in shot-noise units, so a vacuum or coherent mode has
// variance 1 and a squeezed mode with parameter r has variance exp(-2r).
// Only the x quadrature is tracked anywhere in the library.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace multicopy {

/// Raised for any parameter that violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when reading or writing a file fails.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reported for ratios whose denominator is exactly zero (e.g. the GIR of
/// perfectly stable copies). Printed as "inf".
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Statistical description of the N input copies.
struct InputEnsembleSpec {
  double x0 = 0.0;             // mean displacement
  double r0 = 0.0;             // mean squeezing
  double sigma_r = 0.0;        // std of per-copy squeezing fluctuation
  double sigma_x0 = 0.0;       // std of per-copy signal fluctuation
  double sigma_thermal = 0.0;  // classical thermal width; dx = sqrt(1 + s^2)

  bool operator==(const InputEnsembleSpec&) const = default;
};

/// Returns `spec` unchanged, or throws ValidationError naming the field.
InputEnsembleSpec validate_spec(const InputEnsembleSpec& spec);

/// One bosonic mode reduced to its x-quadrature mean and variance.
struct ModeState {
  double mean_x = 0.0;
  double var_x = 1.0;

  bool operator==(const ModeState&) const = default;

  /// |mean| / std. The sign of the displacement carries no information here.
  double snr() const;
};

ModeState validate_mode(const ModeState& mode);

enum class ArchKind {
  Classical,
  PyramidalEquivalent,
  FixedLoopOptimized,
  FixedLoopRule,
  MeasurementInduced,
  HarmonicMean,
};

/// Transmittance rule of a fixed loop: a constant t, or t = 1 - 1/N.
struct TransmittanceRule {
  enum class Kind { Constant, OneMinusInverseN };
  Kind kind = Kind::Constant;
  double t = 0.5;

  double at(int n_copies) const;
  bool operator==(const TransmittanceRule&) const = default;
};

enum class MeasurementMode { Conditional, Feedforward };

/// Interference strategy plus an optional per-beam-splitter loss channel.
struct ArchitectureSpec {
  ArchKind kind = ArchKind::PyramidalEquivalent;
  TransmittanceRule rule{};                         // FixedLoopRule only
  MeasurementMode mode = MeasurementMode::Conditional;  // MeasurementInduced only
  double loss_eta = 1.0;

  static ArchitectureSpec classical();
  static ArchitectureSpec pyramidal();
  static ArchitectureSpec loop_optimized();
  static ArchitectureSpec loop_constant(double t);
  static ArchitectureSpec loop_one_minus_inverse_n();
  static ArchitectureSpec measurement_induced(MeasurementMode mode);
  static ArchitectureSpec harmonic();

  ArchitectureSpec with_loss(double eta) const;

  /// Stable, comma-free identifier used in CSV files and for stream seeding.
  /// Does not include the loss transmittance.
  std::string tag() const;

  bool is_loop() const {
    return kind == ArchKind::FixedLoopOptimized || kind == ArchKind::FixedLoopRule;
  }

  bool operator==(const ArchitectureSpec&) const = default;
};

ArchitectureSpec validate_arch(const ArchitectureSpec& arch);

/// Parses a tag produced by ArchitectureSpec::tag(). Loss is left at 1.
ArchitectureSpec arch_from_tag(const std::string& tag);

/// mean / std, or kInfinity when std == 0.
double gain_to_instability(double mean, double std_dev);

/// Per-N Monte Carlo estimates.
struct SnrStats {
  int n_copies = 0;
  double mean_snr = 0.0;
  double std_snr = 0.0;
  double gir = kInfinity;
  double nf = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  // In-process diagnostics, not serialized.
  double mean_stderr = 0.0;
  double gir_stderr = 0.0;
};

/// Fitted a * N^b.
struct PowerLawFit {
  double a = 1.0;
  double b = 0.0;
  double rms_log_residual = 0.0;
  int n_points = 0;
};

}  // namespace multicopy
