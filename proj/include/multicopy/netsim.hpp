// x-quadrature Gaussian propagation through explicit beam-splitter networks.
//
// A Network is an ordered list of linear-optical elements acting on indexed
// modes. Propagation tracks means, variances and the (sparse) cross
// covariances that beam splitters create, so homodyne conditioning on one
// port correctly updates the correlated partner.
#pragma once

#include <span>
#include <variant>
#include <vector>

#include "multicopy/core.hpp"

namespace multicopy::netsim {

/// keep <- sqrt(t) a + sqrt(1-t) b ; other <- sqrt(1-t) a - sqrt(t) b,
/// where a, b are the incoming `keep`, `other` modes.
struct BeamSplitter {
  int keep;
  int other;
  double t;
};

/// Pure loss: mean *= sqrt(eta), var <- eta var + (1 - eta).
struct Loss {
  int mode;
  double eta;
};

/// Gaussian conditioning on measuring x = outcome; the mode is consumed.
struct HomodyneCondition {
  int mode;
  double outcome;
};

/// Trace the mode out.
struct Discard {
  int mode;
};

/// target <- target + gain * source (classical feedforward of a measured
/// quadrature). The source is left untouched; discard it afterwards.
struct Feedforward {
  int target;
  int source;
  double gain;
};

struct Displace {
  int mode;
  double amount;
};

using Element = std::variant<BeamSplitter, Loss, HomodyneCondition, Discard, Feedforward, Displace>;

class Network {
 public:
  /// Throws ValidationError unless every referenced mode exists and is alive
  /// when used, and exactly `output_mode` survives the element list.
  Network(int num_inputs, int output_mode, std::vector<Element> elements);

  int num_inputs() const { return num_inputs_; }
  int output_mode() const { return output_mode_; }
  std::span<const Element> elements() const { return elements_; }
  int num_conditions() const;

 private:
  int num_inputs_;
  int output_mode_;
  std::vector<Element> elements_;
};

/// Nominal parameters some architectures need at build time.
struct BuildParams {
  double x_m = 0.0;  // homodyne outcome / feedforward target (measurement-induced)
  double r0 = 0.0;   // sets the feedforward gain tanh(2 r0)
};

/// Builds the interferometer for `arch` with `n` copies.
///
/// PyramidalEquivalent, Classical and HarmonicMean use a balanced pyramid
/// when n is a power of two and the t_i = i/(i+1) chain otherwise. Loop kinds
/// use the single-beam-splitter recursion with a fixed t (t* for
/// FixedLoopOptimized). MeasurementInduced takes 2n inputs: modes [0, n) are
/// the x-squeezed A_i, modes [n, 2n) the p-squeezed B_i. When arch.loss_eta
/// < 1, a Loss element precedes both input arms of every interference beam
/// splitter; lossy pyramid-equivalent networks require n = 2^k.
Network build_network(const ArchitectureSpec& arch, int n, const BuildParams& params = {});

/// Constructive-output state. The network may contain conditioning elements;
/// their stored outcomes are used.
ModeState propagate(const Network& net, std::span<const ModeState> inputs);

enum class ConditionalProtocol { Harmonic, MeasurementInduced };

/// Propagates a conditional network, overriding every homodyne outcome with
/// 0 (harmonic) or x_m (measurement-induced). Throws if the network has no
/// conditioning of that kind.
ModeState propagate_conditional(const Network& net, std::span<const ModeState> inputs,
                                ConditionalProtocol protocol, double x_m = 0.0);

/// Output mean coefficient of each input under lossless propagation.
std::vector<double> mean_coefficients(const Network& net);

bool is_power_of_two(int n);

}  // namespace multicopy::netsim
