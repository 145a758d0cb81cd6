#include "multicopy/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "multicopy/fitkit.hpp"

namespace multicopy::netsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Means, variances and sparse cross covariances of the live modes.
class GaussianState {
 public:
  explicit GaussianState(std::span<const ModeState> inputs)
      : mean_(inputs.size()), var_(inputs.size()), cross_(inputs.size()) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      mean_[i] = inputs[i].mean_x;
      var_[i] = inputs[i].var_x;
    }
  }

  void apply(const BeamSplitter& bs) {
    const int a = bs.keep;
    const int b = bs.other;
    const double s = std::sqrt(bs.t);
    const double c = std::sqrt(1.0 - bs.t);
    const double cab = cov(a, b);
    const double va = var_[a];
    const double vb = var_[b];

    const double ma = mean_[a];
    mean_[a] = s * ma + c * mean_[b];
    mean_[b] = c * ma - s * mean_[b];
    var_[a] = bs.t * va + (1.0 - bs.t) * vb + 2.0 * s * c * cab;
    var_[b] = (1.0 - bs.t) * va + bs.t * vb - 2.0 * s * c * cab;

    // Third-party correlations of the two ports.
    std::vector<int> others;
    for (const auto& [k, v] : cross_[a]) if (k != b) others.push_back(k);
    for (const auto& [k, v] : cross_[b]) {
      if (k != a && std::find(others.begin(), others.end(), k) == others.end()) others.push_back(k);
    }
    for (int k : others) {
      const double cak = cov(a, k);
      const double cbk = cov(b, k);
      set_cov(a, k, s * cak + c * cbk);
      set_cov(b, k, c * cak - s * cbk);
    }
    set_cov(a, b, s * c * (va - vb) + (c * c - s * s) * cab);
    check_variance(a);
    check_variance(b);
  }

  void apply(const Loss& loss) {
    const double g = std::sqrt(loss.eta);
    mean_[loss.mode] *= g;
    var_[loss.mode] = loss.eta * var_[loss.mode] + (1.0 - loss.eta);
    for (auto& [k, v] : cross_[loss.mode]) {
      v *= g;
      entry(k, loss.mode) *= g;
    }
    check_variance(loss.mode);
  }

  void apply(const HomodyneCondition& hc) {
    const int m = hc.mode;
    const double vm = var_[m];
    if (!(vm > 1e-300)) throw ValidationError("cannot condition on a deterministic mode");
    const double innovation = hc.outcome - mean_[m];
    const std::vector<std::pair<int, double>> links = cross_[m];
    for (const auto& [k, ckm] : links) mean_[k] += ckm / vm * innovation;
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto [k, ckm] = links[i];
      var_[k] -= ckm * ckm / vm;
      for (std::size_t j = i + 1; j < links.size(); ++j) {
        const auto [l, clm] = links[j];
        set_cov(k, l, cov(k, l) - ckm * clm / vm);
      }
    }
    remove(m);
    for (const auto& link : links) check_variance(link.first);
  }

  void apply(const Discard& d) { remove(d.mode); }

  void apply(const Feedforward& ff) {
    const int t = ff.target;
    const int s = ff.source;
    const double g = ff.gain;
    const double cts = cov(t, s);
    mean_[t] += g * mean_[s];
    var_[t] += 2.0 * g * cts + g * g * var_[s];
    std::vector<std::pair<int, double>> source_links = cross_[s];
    for (const auto& [k, csk] : source_links) {
      if (k == t) continue;
      set_cov(t, k, cov(t, k) + g * csk);
    }
    set_cov(t, s, cts + g * var_[s]);
    check_variance(t);
  }

  void apply(const Displace& d) { mean_[d.mode] += d.amount; }

  ModeState mode(int m) const { return {mean_[m], var_[m]}; }

 private:
  double cov(int i, int j) const {
    for (const auto& [k, v] : cross_[i]) if (k == j) return v;
    return 0.0;
  }

  double& entry(int i, int j) {
    for (auto& [k, v] : cross_[i]) if (k == j) return v;
    cross_[i].emplace_back(j, 0.0);
    return cross_[i].back().second;
  }

  void set_cov(int i, int j, double v) {
    entry(i, j) = v;
    entry(j, i) = v;
  }

  void remove(int m) {
    for (const auto& [k, v] : cross_[m]) {
      auto& row = cross_[k];
      row.erase(std::remove_if(row.begin(), row.end(), [m](const auto& e) { return e.first == m; }),
                row.end());
    }
    cross_[m].clear();
  }

  void check_variance(int m) const {
    if (!(var_[m] > 0.0)) throw ValidationError("variance underflow in mode " + std::to_string(m));
  }

  std::vector<double> mean_;
  std::vector<double> var_;
  std::vector<std::vector<std::pair<int, double>>> cross_;
};

class NetworkBuilder {
 public:
  explicit NetworkBuilder(double loss_eta) : loss_eta_(loss_eta) {}

  // Interference beam splitter; both arms pass through the loss channel first.
  void interfere(int keep, int other, double t) {
    if (loss_eta_ < 1.0) {
      elements_.push_back(Loss{keep, loss_eta_});
      elements_.push_back(Loss{other, loss_eta_});
    }
    elements_.push_back(BeamSplitter{keep, other, t});
  }

  void add(Element e) { elements_.push_back(e); }

  std::vector<Element> take() { return std::move(elements_); }

 private:
  double loss_eta_;
  std::vector<Element> elements_;
};

enum class PortFate { Discard, ConditionOnZero };

void close_port(NetworkBuilder& b, int mode, PortFate fate) {
  if (fate == PortFate::Discard)
    b.add(Discard{mode});
  else
    b.add(HomodyneCondition{mode, 0.0});
}

// Concentrates modes[0..n) into modes[0]; pyramid for n = 2^k, chain otherwise.
void add_equal_weight_combiner(NetworkBuilder& b, std::span<const int> modes, PortFate fate) {
  const int n = static_cast<int>(modes.size());
  if (is_power_of_two(n)) {
    std::vector<int> layer(modes.begin(), modes.end());
    while (layer.size() > 1) {
      std::vector<int> next;
      for (std::size_t j = 0; j + 1 < layer.size(); j += 2) {
        b.interfere(layer[j], layer[j + 1], 0.5);
        close_port(b, layer[j + 1], fate);
        next.push_back(layer[j]);
      }
      layer = std::move(next);
    }
    return;
  }
  for (int i = 1; i < n; ++i) {
    b.interfere(modes[0], modes[i], static_cast<double>(i) / (i + 1));
    close_port(b, modes[i], fate);
  }
}

void add_loop(NetworkBuilder& b, int n, double t) {
  for (int i = 1; i < n; ++i) {
    b.interfere(0, i, t);
    b.add(Discard{i});
  }
}

template <class T>
bool holds(const Element& e) {
  return std::holds_alternative<T>(e);
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Network::Network(int num_inputs, int output_mode, std::vector<Element> elements)
    : num_inputs_(num_inputs), output_mode_(output_mode), elements_(std::move(elements)) {
  if (num_inputs < 1) throw ValidationError("network needs at least one input");
  std::vector<char> alive(static_cast<std::size_t>(num_inputs), 1);
  auto live = [&](int m, const char* what) {
    if (m < 0 || m >= num_inputs || !alive[m])
      throw ValidationError(std::string(what) + " references unavailable mode " +
                            std::to_string(m));
  };
  for (const Element& e : elements_) {
    std::visit(Overloaded{
                   [&](const BeamSplitter& bs) {
                     live(bs.keep, "BeamSplitter");
                     live(bs.other, "BeamSplitter");
                     if (bs.keep == bs.other) throw ValidationError("BeamSplitter ports coincide");
                     if (!(bs.t >= 0.0 && bs.t <= 1.0))
                       throw ValidationError("BeamSplitter t outside [0, 1]");
                   },
                   [&](const Loss& l) {
                     live(l.mode, "Loss");
                     if (!(l.eta >= 0.0 && l.eta <= 1.0))
                       throw ValidationError("Loss eta outside [0, 1]");
                   },
                   [&](const HomodyneCondition& h) {
                     live(h.mode, "HomodyneCondition");
                     alive[h.mode] = 0;
                   },
                   [&](const Discard& d) {
                     live(d.mode, "Discard");
                     alive[d.mode] = 0;
                   },
                   [&](const Feedforward& f) {
                     live(f.target, "Feedforward");
                     live(f.source, "Feedforward");
                     if (f.target == f.source) throw ValidationError("Feedforward onto itself");
                   },
                   [&](const Displace& d) { live(d.mode, "Displace"); },
               },
               e);
  }
  live(output_mode, "output");
  const auto survivors = std::count(alive.begin(), alive.end(), 1);
  if (survivors != 1)
    throw ValidationError("network leaves " + std::to_string(survivors) +
                          " modes alive; exactly one constructive output is required");
}

int Network::num_conditions() const {
  return static_cast<int>(std::count_if(elements_.begin(), elements_.end(),
                                        holds<HomodyneCondition>));
}

Network build_network(const ArchitectureSpec& arch_in, int n, const BuildParams& params) {
  const ArchitectureSpec arch = validate_arch(arch_in);
  if (n < 2) throw ValidationError("network needs n >= 2 copies");
  const bool lossy = arch.loss_eta < 1.0;
  const bool pyramid_like = arch.kind == ArchKind::Classical ||
                            arch.kind == ArchKind::PyramidalEquivalent ||
                            arch.kind == ArchKind::HarmonicMean ||
                            arch.kind == ArchKind::MeasurementInduced;
  if (lossy && pyramid_like && !is_power_of_two(n))
    throw ValidationError("lossy pyramidal network requires n to be a power of two, got " +
                          std::to_string(n));

  NetworkBuilder b(arch.loss_eta);
  std::vector<int> modes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) modes[i] = i;

  switch (arch.kind) {
    case ArchKind::Classical:
    case ArchKind::PyramidalEquivalent:
      add_equal_weight_combiner(b, modes, PortFate::Discard);
      return Network(n, 0, b.take());
    case ArchKind::HarmonicMean:
      add_equal_weight_combiner(b, modes, PortFate::ConditionOnZero);
      return Network(n, 0, b.take());
    case ArchKind::FixedLoopOptimized:
      add_loop(b, n, fitkit::optimize_transmittance(n).t_star);
      return Network(n, 0, b.take());
    case ArchKind::FixedLoopRule:
      add_loop(b, n, arch.rule.at(n));
      return Network(n, 0, b.take());
    case ArchKind::MeasurementInduced: {
      // Copy preparation is lossless; loss acts inside the interferometer only.
      const double gain = std::tanh(2.0 * params.r0);
      for (int i = 0; i < n; ++i) {
        b.add(BeamSplitter{i, n + i, 0.5});
        if (arch.mode == MeasurementMode::Conditional) {
          b.add(HomodyneCondition{n + i, params.x_m});
        } else {
          b.add(Feedforward{i, n + i, gain});
          b.add(Discard{n + i});
          b.add(Displace{i, gain * params.x_m});
        }
      }
      add_equal_weight_combiner(b, modes, PortFate::Discard);
      return Network(2 * n, 0, b.take());
    }
  }
  throw ValidationError("unsupported architecture");
}

ModeState propagate(const Network& net, std::span<const ModeState> inputs) {
  if (static_cast<int>(inputs.size()) != net.num_inputs())
    throw ValidationError("network expects " + std::to_string(net.num_inputs()) +
                          " inputs, got " + std::to_string(inputs.size()));
  for (const ModeState& in : inputs) validate_mode(in);
  GaussianState state(inputs);
  for (const Element& e : net.elements()) std::visit([&](const auto& el) { state.apply(el); }, e);
  return state.mode(net.output_mode());
}

ModeState propagate_conditional(const Network& net, std::span<const ModeState> inputs,
                                ConditionalProtocol protocol, double x_m) {
  if (net.num_conditions() == 0)
    throw ValidationError("network contains no homodyne conditioning");
  const double outcome = protocol == ConditionalProtocol::Harmonic ? 0.0 : x_m;
  std::vector<Element> elements(net.elements().begin(), net.elements().end());
  for (Element& e : elements) {
    if (auto* h = std::get_if<HomodyneCondition>(&e)) h->outcome = outcome;
  }
  return propagate(Network(net.num_inputs(), net.output_mode(), std::move(elements)), inputs);
}

std::vector<double> mean_coefficients(const Network& net) {
  if (net.num_conditions() > 0)
    throw ValidationError("mean coefficients are defined for passive networks only");
  std::vector<double> coeffs(static_cast<std::size_t>(net.num_inputs()));
  std::vector<ModeState> inputs(coeffs.size(), ModeState{0.0, 1.0});
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    inputs[j].mean_x = 1.0;
    coeffs[j] = propagate(net, inputs).mean_x;
    inputs[j].mean_x = 0.0;
  }
  return coeffs;
}

}  // namespace multicopy::netsim
