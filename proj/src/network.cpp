#include "dropneuron/network.hpp"

#include <cmath>

#include "dropneuron/errors.hpp"

namespace dropneuron {

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::linear:
      return z;
    case Activation::logistic:
      // Split by sign so exp never overflows.
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      {
        const double e = std::exp(z);
        return e / (1.0 + e);
      }
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
  }
  return z;
}

double activation_derivative(Activation a, double z, double out) noexcept {
  switch (a) {
    case Activation::linear:
      return 1.0;
    case Activation::logistic:
      return out * (1.0 - out);
    case Activation::relu:
      return z > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::linear:
      return "linear";
    case Activation::logistic:
      return "logistic";
    case Activation::relu:
      return "relu";
  }
  return "linear";
}

std::optional<Activation> parse_activation(std::string_view name) noexcept {
  if (name == "linear") return Activation::linear;
  if (name == "logistic" || name == "sigmoid") return Activation::logistic;
  if (name == "relu") return Activation::relu;
  return std::nullopt;
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("Network: at least one layer is required");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    if (l.weights.cols() != l.biases.size()) {
      throw DimensionError("Network: layer " + std::to_string(k + 1) + " has " + std::to_string(l.weights.cols()) +
                           " columns but " + std::to_string(l.biases.size()) + " biases");
    }
    if (l.fan_in() == 0 || l.fan_out() == 0) {
      throw DimensionError("Network: layer " + std::to_string(k + 1) + " has a zero dimension");
    }
    if (k > 0 && layers_[k - 1].fan_out() != l.fan_in()) {
      throw DimensionError("Network: layer " + std::to_string(k) + " outputs " +
                           std::to_string(layers_[k - 1].fan_out()) + " but layer " + std::to_string(k + 1) +
                           " expects " + std::to_string(l.fan_in()));
    }
  }
}

std::vector<std::size_t> Network::dims() const {
  std::vector<std::size_t> d{input_dim()};
  for (const auto& l : layers_) d.push_back(l.fan_out());
  return d;
}

std::size_t Network::weight_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size();
  return n;
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

Gradient zero_gradient(const Network& net) {
  Gradient g;
  g.reserve(net.depth());
  for (const auto& l : net.layers()) {
    g.push_back({Matrix(l.fan_in(), l.fan_out()), std::vector<double>(l.fan_out(), 0.0)});
  }
  return g;
}

DropoutSpec DropoutSpec::hidden(const Network& net, double keep_prob) {
  DropoutSpec spec{keep_prob, {}};
  for (std::size_t k = 1; k < net.depth(); ++k) spec.apply_to.push_back(k);
  return spec;
}

void DropoutSpec::validate(std::size_t depth) const {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ArgumentError("dropout keep_prob must lie in (0, 1], got " + std::to_string(keep_prob));
  }
  for (std::size_t p : apply_to) {
    if (p > depth) {
      throw ArgumentError("dropout position " + std::to_string(p) + " exceeds network depth " + std::to_string(depth));
    }
  }
}

namespace {

void apply_layer(const Layer& layer, const Matrix& in, Matrix& out) {
  out = Matrix(in.rows(), layer.fan_out());
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto o = out.row(r);
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = layer.biases[j];
    auto x = in.row(r);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      auto w = layer.weights.row(i);
      for (std::size_t j = 0; j < o.size(); ++j) o[j] += xi * w[j];
    }
    for (double& v : o) v = activate(layer.activation, v);
  }
}

void check_input(const Network& net, const Matrix& x) {
  if (x.cols() != net.input_dim()) {
    throw DimensionError("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                         std::to_string(net.input_dim()));
  }
}

void apply_mask(Matrix& h, const Matrix& mask) {
  if (mask.empty()) return;
  auto hv = h.values();
  auto mv = mask.values();
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] *= mv[i];
}

}  // namespace

Matrix forward(const Network& net, const Matrix& x) {
  check_input(net, x);
  Matrix h = x;
  Matrix next;
  for (const auto& layer : net.layers()) {
    apply_layer(layer, h, next);
    std::swap(h, next);
  }
  return h;
}

DropoutMasks sample_dropout_masks(const Network& net, std::size_t batch, const DropoutSpec& dropout, Rng& rng) {
  dropout.validate(net.depth());
  DropoutMasks masks(net.depth() + 1);
  if (!dropout.active()) return masks;
  const auto dims = net.dims();
  const double kept = 1.0 / dropout.keep_prob;
  for (std::size_t p : dropout.apply_to) {
    Matrix m(batch, dims[p]);
    for (double& v : m.values()) v = rng.bernoulli(dropout.keep_prob) ? kept : 0.0;
    masks[p] = std::move(m);
  }
  return masks;
}

Matrix forward_masked(const Network& net, const Matrix& x, const DropoutMasks& masks) {
  check_input(net, x);
  if (masks.size() != net.depth() + 1) throw DimensionError("forward_masked: expected one mask slot per position");
  Matrix h = x;
  apply_mask(h, masks[0]);
  Matrix next;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    apply_layer(net.layer(k), h, next);
    std::swap(h, next);
    apply_mask(h, masks[k + 1]);
  }
  return h;
}

TrainForward forward_train(const Network& net, const Matrix& x, const DropoutSpec& dropout, Rng& rng) {
  check_input(net, x);
  TrainForward out;
  out.masks = sample_dropout_masks(net, x.rows(), dropout, rng);
  out.output = forward_masked(net, x, out.masks);
  return out;
}

Network init_network(Rng& rng, const std::vector<std::size_t>& dims, const std::vector<Activation>& activations) {
  if (dims.size() < 2) throw ArgumentError("init_network: need at least input and output dimensions");
  if (activations.size() != dims.size() - 1) {
    throw ArgumentError("init_network: " + std::to_string(dims.size() - 1) + " layers but " +
                        std::to_string(activations.size()) + " activations");
  }
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[k] + dims[k + 1]));
    Layer layer{Matrix(dims[k], dims[k + 1]), std::vector<double>(dims[k + 1], 0.0), activations[k]};
    for (double& w : layer.weights.values()) w = rng.uniform(-limit, limit);
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers));
}

}  // namespace dropneuron
