// Closed-form SNR, GIR and transmittance formulas for multicopy constructive
// interference of displaced squeezed states.
//
// Conventions: `deltas` are per-copy squeezing deviations dr_i around r0,
// so copy i has x-variance exp(-2 (r0 + dr_i)). Ratios that diverge for
// perfectly stable inputs return kInfinity.
#pragma once

#include <span>
#include <vector>

#include "multicopy/core.hpp"

namespace multicopy::analytic {

/// sqrt(n) x0 / sqrt(1 + sigma_thermal^2): ideal interference of coherent
/// (optionally thermally broadened) inputs.
double snr_classical(int n, double x0, double sigma_thermal = 0.0);

/// sqrt(n) e^{r0} x0: identical, perfectly stable squeezed inputs.
double snr_stable_squeezed(int n, double x0, double r0);

/// N e^{r0} x0 / sqrt(sum_i e^{-2 dr_i}) at the constructive output of the
/// ideal (pyramid-equivalent) network.
double snr_multiport(double x0, double r0, std::span<const double> deltas);

/// Second-order expansion of the mean SNR over dr_i ~ N(0, sigma_r^2).
double mean_snr_approx(int n, double x0, double r0, double sigma_r);

/// Large-N limit of mean_snr_approx.
double mean_snr_asymptotic(int n, double x0, double r0, double sigma_r);

struct InputCopyStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double stability_ratio = kInfinity;  // mean / std_dev
};

/// Log-normal moments of the single-copy input SNR x0 e^{r0 + dr}.
InputCopyStats input_copy_stats(double x0, double r0, double sigma_r);

/// Second-order GIR of the pyramid-equivalent architectures. Independent of
/// x0 and r0. kInfinity at sigma_r == 0.
double gir_approx(int n, double sigma_r);
double gir_asymptotic(int n, double sigma_r);

enum class NfDenominator {
  Ideal,         // x0 e^{r0}
  FluctuatingMean,  // <SNR_in> = x0 e^{r0} e^{sigma_r^2 / 2}
};

/// Output SNR over single-copy input SNR.
double noise_figure(double mean_snr_out, double x0, double r0,
                    NfDenominator denominator = NfDenominator::Ideal, double sigma_r = 0.0);

/// Accumulated transmittances of a fixed loop with transmittance t:
/// tau_1 = t^{n-1}, tau_i = (1 - t) t^{n-i} for i > 1.
std::vector<double> tau_weights(double t, int n);

/// Fixed-loop SNR: x0 sum sqrt(tau_i) / (e^{-r0} sqrt(sum tau_i e^{-2 dr_i})).
double snr_fixed_loop(double x0, double r0, std::span<const double> deltas, double t);

/// Mean output displacement of the fixed loop per unit x0, sum_i sqrt(tau_i).
double displacement_objective(double t, int n);

/// d/dt of displacement_objective.
double displacement_objective_derivative(double t, int n);

struct MeasurementInducedCopy {
  double displacement = 0.0;
  double variance = 1.0;
};

/// Conditional state of the unmeasured output after two orthogonally
/// squeezed vacua (x-variances sA^2 = e^{-2(r0 + delta_a)} and
/// sB^-2 = e^{2(r0 + delta_b)}) meet on a balanced beam splitter and the
/// other output is found at x = x_m.
MeasurementInducedCopy measurement_induced_copy(double x_m, double r0, double delta_a,
                                                double delta_b);

/// Deterministic variant: instead of post-selecting, the measured quadrature
/// is fed forward with gain g = tanh(2 r0) (optimal for the nominal r0) and
/// the output is displaced by g x_m. The variance is that of u + g w, which
/// exceeds the conditional variance whenever delta_a or delta_b != 0.
MeasurementInducedCopy feedforward_copy(double x_m, double r0, double delta_a, double delta_b);

/// Harmonic-mean conditional protocol: x0 e^{r0} sqrt(sum_i e^{2 dr_i}).
double snr_harmonic(double x0, double r0, std::span<const double> deltas);

/// Output of a passive network with amplitude weights w_i (sum w_i^2 = 1 on
/// the constructive port): mean sum w_i m_i, variance sum w_i^2 v_i.
ModeState combine_linear(std::span<const double> weights, std::span<const ModeState> inputs);

/// Output of the harmonic-mean conditional protocol for arbitrary inputs:
/// mean sqrt(N) * (inverse-variance weighted input mean), variance equal to
/// the harmonic mean of the input variances.
ModeState combine_harmonic(std::span<const ModeState> inputs);

}  // namespace multicopy::analytic
