#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dropneuron/matrix.hpp"
#include "dropneuron/rng.hpp"

namespace dropneuron {

enum class Activation { linear, logistic, relu };

double activate(Activation a, double z) noexcept;
/// Derivative of the activation, given the pre-activation z and its output.
double activation_derivative(Activation a, double z, double out) noexcept;

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> parse_activation(std::string_view name) noexcept;

/// Dense layer: out = act(in * weights + biases).
/// weights is fan_in x fan_out; row i holds neuron i's outgoing connections,
/// column j holds neuron j's incoming connections.
struct Layer {
  Matrix weights;
  std::vector<double> biases;
  Activation activation = Activation::linear;

  std::size_t fan_in() const noexcept { return weights.rows(); }
  std::size_t fan_out() const noexcept { return weights.cols(); }

  friend bool operator==(const Layer&, const Layer&) = default;
};

class Network {
 public:
  Network() = default;
  /// Validates conformity; throws DimensionError otherwise.
  explicit Network(std::vector<Layer> layers);

  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_dim() const noexcept { return layers_.front().fan_in(); }
  std::size_t output_dim() const noexcept { return layers_.back().fan_out(); }
  /// Widths of every activation position: input, then each layer's output.
  std::vector<std::size_t> dims() const;

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t k) const { return layers_.at(k); }
  /// Mutable access for optimizers. Must not change shapes.
  Layer& mutable_layer(std::size_t k) { return layers_.at(k); }

  std::size_t weight_count() const noexcept;
  std::size_t parameter_count() const noexcept;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<Layer> layers_;
};

/// Per-layer gradient with the same shapes as the network's parameters.
struct LayerGradient {
  Matrix weights;
  std::vector<double> biases;
};
using Gradient = std::vector<LayerGradient>;

Gradient zero_gradient(const Network& net);

/// Dropout configuration. Positions index activations: 0 is the input,
/// k >= 1 is the output of layer k (1-based). Hidden-only dropout on an
/// L-layer net is {1, ..., L-1}.
struct DropoutSpec {
  double keep_prob = 1.0;
  std::vector<std::size_t> apply_to;

  bool active() const noexcept { return keep_prob < 1.0 && !apply_to.empty(); }
  static DropoutSpec none() { return {}; }
  static DropoutSpec hidden(const Network& net, double keep_prob);
  /// Throws ArgumentError for keep_prob outside (0, 1] or positions past the output.
  void validate(std::size_t depth) const;
};

/// One mask per activation position; an empty matrix means "not masked".
/// Mask entries are 0 or 1/keep_prob (inverted dropout).
using DropoutMasks = std::vector<Matrix>;

Matrix forward(const Network& net, const Matrix& x);

DropoutMasks sample_dropout_masks(const Network& net, std::size_t batch, const DropoutSpec& dropout, Rng& rng);
Matrix forward_masked(const Network& net, const Matrix& x, const DropoutMasks& masks);

struct TrainForward {
  Matrix output;
  DropoutMasks masks;
};
TrainForward forward_train(const Network& net, const Matrix& x, const DropoutSpec& dropout, Rng& rng);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// activations.size() must be dims.size() - 1.
Network init_network(Rng& rng, const std::vector<std::size_t>& dims, const std::vector<Activation>& activations);

}  // namespace dropneuron
