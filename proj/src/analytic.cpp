#include "multicopy/analytic.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace multicopy::analytic {

namespace {

void require_copies(int n, int min_n = 1) {
  if (n < min_n)
    throw ValidationError("number of copies must be >= " + std::to_string(min_n));
}

void require_sigma(double sigma_r) {
  if (!(sigma_r >= 0.0) || !std::isfinite(sigma_r)) throw ValidationError("sigma_r negative");
}

void require_open_unit(double t) {
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("transmittance t must lie in (0, 1)");
}

double sqrt_n(int n) { return std::sqrt(static_cast<double>(n)); }

}  // namespace

double snr_classical(int n, double x0, double sigma_thermal) {
  require_copies(n);
  return sqrt_n(n) * x0 / std::sqrt(1.0 + sigma_thermal * sigma_thermal);
}

double snr_stable_squeezed(int n, double x0, double r0) {
  require_copies(n);
  return sqrt_n(n) * std::exp(r0) * x0;
}

double snr_multiport(double x0, double r0, std::span<const double> deltas) {
  if (deltas.empty()) throw ValidationError("deltas must not be empty");
  double noise = 0.0;
  for (double d : deltas) noise += std::exp(-2.0 * d);
  return static_cast<double>(deltas.size()) * std::exp(r0) * x0 / std::sqrt(noise);
}

double mean_snr_approx(int n, double x0, double r0, double sigma_r) {
  require_sigma(sigma_r);
  const double correction = 1.0 + (1.5 / n - 1.0) * sigma_r * sigma_r;
  return snr_stable_squeezed(n, x0, r0) * correction;
}

double mean_snr_asymptotic(int n, double x0, double r0, double sigma_r) {
  require_sigma(sigma_r);
  return snr_stable_squeezed(n, x0, r0) * (1.0 - sigma_r * sigma_r);
}

InputCopyStats input_copy_stats(double x0, double r0, double sigma_r) {
  require_sigma(sigma_r);
  const double var = sigma_r * sigma_r;
  InputCopyStats s;
  s.mean = x0 * std::exp(r0) * std::exp(0.5 * var);
  const double spread = std::sqrt(std::expm1(var));
  s.std_dev = s.mean * spread;
  s.stability_ratio = spread == 0.0 ? kInfinity : 1.0 / spread;
  return s;
}

double gir_approx(int n, double sigma_r) {
  require_copies(n);
  require_sigma(sigma_r);
  if (sigma_r == 0.0) return kInfinity;
  return sqrt_n(n) * (1.0 / sigma_r + (1.5 / n - 1.0) * sigma_r);
}

double gir_asymptotic(int n, double sigma_r) {
  require_copies(n);
  require_sigma(sigma_r);
  if (sigma_r == 0.0) return kInfinity;
  return sqrt_n(n) * (1.0 / sigma_r - sigma_r);
}

double noise_figure(double mean_snr_out, double x0, double r0, NfDenominator denominator,
                    double sigma_r) {
  if (!(x0 > 0.0)) throw ValidationError("noise figure needs x0 > 0");
  double input = x0 * std::exp(r0);
  if (denominator == NfDenominator::FluctuatingMean) {
    require_sigma(sigma_r);
    input *= std::exp(0.5 * sigma_r * sigma_r);
  }
  return mean_snr_out / input;
}

std::vector<double> tau_weights(double t, int n) {
  require_open_unit(t);
  require_copies(n, 2);
  std::vector<double> tau(static_cast<std::size_t>(n));
  tau[0] = std::pow(t, n - 1);
  for (int i = 2; i <= n; ++i) tau[i - 1] = (1.0 - t) * std::pow(t, n - i);
  return tau;
}

double snr_fixed_loop(double x0, double r0, std::span<const double> deltas, double t) {
  const int n = static_cast<int>(deltas.size());
  const std::vector<double> tau = tau_weights(t, n);
  double amplitude = 0.0;
  double noise = 0.0;
  for (int i = 0; i < n; ++i) {
    amplitude += std::sqrt(tau[i]);
    noise += tau[i] * std::exp(-2.0 * deltas[i]);
  }
  return x0 * amplitude / (std::exp(-r0) * std::sqrt(noise));
}

double displacement_objective(double t, int n) {
  require_open_unit(t);
  require_copies(n, 2);
  const double root_t = std::sqrt(t);
  if (std::abs(root_t - t) < 1e-9) {
    const std::vector<double> tau = tau_weights(t, n);
    return std::accumulate(tau.begin(), tau.end(), 0.0,
                           [](double acc, double w) { return acc + std::sqrt(w); });
  }
  // t^m + sqrt(1-t) (1 - t^m) / (1 - sqrt t), m = (n-1)/2, with the
  // geometric factor rewritten through expm1 to stay accurate near t -> 1.
  const double m = 0.5 * (n - 1);
  const double tail = -std::expm1(m * std::log(t));
  return std::pow(t, m) + (1.0 + root_t) * tail / std::sqrt(1.0 - t);
}

double displacement_objective_derivative(double t, int n) {
  require_open_unit(t);
  require_copies(n, 2);
  const double m = 0.5 * (n - 1);
  const double root_t = std::sqrt(t);
  const double t_m = std::pow(t, m);
  const double tail = -std::expm1(m * std::log(t));
  const double inv_root_1mt = 1.0 / std::sqrt(1.0 - t);
  const double dtail = -m * t_m / t;
  const double head = m * t_m / t;
  return head + (0.5 / root_t) * tail * inv_root_1mt + (1.0 + root_t) * dtail * inv_root_1mt +
         (1.0 + root_t) * tail * 0.5 * inv_root_1mt * inv_root_1mt * inv_root_1mt;
}

MeasurementInducedCopy measurement_induced_copy(double x_m, double r0, double delta_a,
                                                double delta_b) {
  const double var_a = std::exp(-2.0 * (r0 + delta_a));
  const double var_b = std::exp(2.0 * (r0 + delta_b));  // anti-squeezed x of mode B
  const double sum = var_a + var_b;
  return {.displacement = x_m * (var_a - var_b) / sum, .variance = 2.0 * var_a * var_b / sum};
}

MeasurementInducedCopy feedforward_copy(double x_m, double r0, double delta_a, double delta_b) {
  const double var_a = std::exp(-2.0 * (r0 + delta_a));
  const double var_b = std::exp(2.0 * (r0 + delta_b));
  const double gain = std::tanh(2.0 * r0);
  // u + g w = ((1+g) a + (1-g) b) / sqrt 2 with 1 -+ tanh(x) = 2 / (1 + e^{+-2x}).
  const double one_plus = 2.0 / (1.0 + std::exp(-4.0 * r0));
  const double one_minus = 2.0 / (1.0 + std::exp(4.0 * r0));
  return {.displacement = gain * x_m,
          .variance = 0.5 * (one_plus * one_plus * var_a + one_minus * one_minus * var_b)};
}

double snr_harmonic(double x0, double r0, std::span<const double> deltas) {
  if (deltas.empty()) throw ValidationError("deltas must not be empty");
  double precision = 0.0;
  for (double d : deltas) precision += std::exp(2.0 * d);
  return x0 * std::exp(r0) * std::sqrt(precision);
}

ModeState combine_linear(std::span<const double> weights, std::span<const ModeState> inputs) {
  if (weights.size() != inputs.size() || inputs.empty())
    throw ValidationError("weights and inputs must have the same non-zero length");
  ModeState out{0.0, 0.0};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.mean_x += weights[i] * inputs[i].mean_x;
    out.var_x += weights[i] * weights[i] * inputs[i].var_x;
  }
  return out;
}

ModeState combine_harmonic(std::span<const ModeState> inputs) {
  if (inputs.empty()) throw ValidationError("inputs must not be empty");
  double precision = 0.0;
  double weighted_mean = 0.0;
  for (const ModeState& in : inputs) {
    precision += 1.0 / in.var_x;
    weighted_mean += in.mean_x / in.var_x;
  }
  const double n = static_cast<double>(inputs.size());
  return {.mean_x = std::sqrt(n) * weighted_mean / precision, .var_x = n / precision};
}

}  // namespace multicopy::analytic
