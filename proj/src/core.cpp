#include "multicopy/core.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace multicopy {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ValidationError(std::string(field) + " must be finite");
}

void require_width(double v, const char* field) {
  require_finite(v, field);
  if (v < 0.0) throw ValidationError(std::string(field) + " negative");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

InputEnsembleSpec validate_spec(const InputEnsembleSpec& spec) {
  require_finite(spec.x0, "x0");
  if (spec.x0 < 0.0) throw ValidationError("x0 negative");
  require_finite(spec.r0, "r0");
  require_width(spec.sigma_r, "sigma_r");
  require_width(spec.sigma_x0, "sigma_x0");
  require_width(spec.sigma_thermal, "sigma_thermal");
  return spec;
}

double ModeState::snr() const { return std::abs(mean_x) / std::sqrt(var_x); }

ModeState validate_mode(const ModeState& mode) {
  require_finite(mode.mean_x, "mean_x");
  require_finite(mode.var_x, "var_x");
  if (mode.var_x <= 0.0) throw ValidationError("var_x must be positive");
  return mode;
}

double TransmittanceRule::at(int n_copies) const {
  if (kind == Kind::Constant) return t;
  return 1.0 - 1.0 / static_cast<double>(n_copies);
}

ArchitectureSpec ArchitectureSpec::classical() { return {.kind = ArchKind::Classical}; }

ArchitectureSpec ArchitectureSpec::pyramidal() {
  return {.kind = ArchKind::PyramidalEquivalent};
}

ArchitectureSpec ArchitectureSpec::loop_optimized() {
  return {.kind = ArchKind::FixedLoopOptimized};
}

ArchitectureSpec ArchitectureSpec::loop_constant(double t) {
  return {.kind = ArchKind::FixedLoopRule,
          .rule = {TransmittanceRule::Kind::Constant, t}};
}

ArchitectureSpec ArchitectureSpec::loop_one_minus_inverse_n() {
  return {.kind = ArchKind::FixedLoopRule,
          .rule = {TransmittanceRule::Kind::OneMinusInverseN, 0.0}};
}

ArchitectureSpec ArchitectureSpec::measurement_induced(MeasurementMode mode) {
  return {.kind = ArchKind::MeasurementInduced, .mode = mode};
}

ArchitectureSpec ArchitectureSpec::harmonic() { return {.kind = ArchKind::HarmonicMean}; }

ArchitectureSpec ArchitectureSpec::with_loss(double eta) const {
  ArchitectureSpec out = *this;
  out.loss_eta = eta;
  return out;
}

std::string ArchitectureSpec::tag() const {
  switch (kind) {
    case ArchKind::Classical:
      return "classical";
    case ArchKind::PyramidalEquivalent:
      return "pyramidal";
    case ArchKind::FixedLoopOptimized:
      return "loop_optimized";
    case ArchKind::FixedLoopRule:
      if (rule.kind == TransmittanceRule::Kind::OneMinusInverseN) return "loop_one_minus_inv_n";
      return "loop_t=" + format_real(rule.t);
    case ArchKind::MeasurementInduced:
      return mode == MeasurementMode::Conditional ? "measurement_induced_conditional"
                                                  : "measurement_induced_feedforward";
    case ArchKind::HarmonicMean:
      return "harmonic";
  }
  return "unknown";
}

ArchitectureSpec validate_arch(const ArchitectureSpec& arch) {
  require_finite(arch.loss_eta, "loss_eta");
  if (arch.loss_eta < 0.0 || arch.loss_eta > 1.0)
    throw ValidationError("loss_eta must lie in [0, 1]");
  if (arch.kind == ArchKind::FixedLoopRule &&
      arch.rule.kind == TransmittanceRule::Kind::Constant) {
    require_finite(arch.rule.t, "t");
    if (!(arch.rule.t > 0.0 && arch.rule.t < 1.0))
      throw ValidationError("constant t must lie strictly inside (0, 1)");
  }
  return arch;
}

ArchitectureSpec arch_from_tag(const std::string& tag) {
  if (tag == "classical") return ArchitectureSpec::classical();
  if (tag == "pyramidal") return ArchitectureSpec::pyramidal();
  if (tag == "loop_optimized") return ArchitectureSpec::loop_optimized();
  if (tag == "loop_one_minus_inv_n") return ArchitectureSpec::loop_one_minus_inverse_n();
  if (tag == "measurement_induced_conditional")
    return ArchitectureSpec::measurement_induced(MeasurementMode::Conditional);
  if (tag == "measurement_induced_feedforward")
    return ArchitectureSpec::measurement_induced(MeasurementMode::Feedforward);
  if (tag == "harmonic") return ArchitectureSpec::harmonic();
  const std::string prefix = "loop_t=";
  if (tag.rfind(prefix, 0) == 0) {
    const std::string rest = tag.substr(prefix.size());
    char* end = nullptr;
    const double t = std::strtod(rest.c_str(), &end);
    if (end != rest.c_str() && *end == '\0')
      return validate_arch(ArchitectureSpec::loop_constant(t));
  }
  throw ValidationError("unknown architecture tag '" + tag + "'");
}

double gain_to_instability(double mean, double std_dev) {
  if (std_dev == 0.0) return kInfinity;
  return mean / std_dev;
}

}  // namespace multicopy
