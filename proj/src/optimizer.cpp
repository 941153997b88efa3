#include "dropneuron/optimizer.hpp"

#include <cmath>

#include "dropneuron/errors.hpp"

namespace dropneuron {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, const AdamHyper& hyper) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw DimensionError("adam_step: parameter, gradient and state sizes differ");
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
}

void sgd_step(std::span<double> params, std::span<const double> grads, const SgdHyper& hyper) {
  if (params.size() != grads.size()) throw DimensionError("sgd_step: parameter and gradient sizes differ");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= hyper.lr * grads[i];
}

NetworkOptimizer::NetworkOptimizer(const Network& net, OptimizerConfig config, bool update_biases)
    : config_(config), update_biases_(update_biases) {
  if (std::holds_alternative<AdamHyper>(config_)) {
    for (const auto& l : net.layers()) {
      adam_.emplace_back(l.weights.size());
      adam_.emplace_back(l.biases.size());
    }
  }
}

void NetworkOptimizer::step(Network& net, const Gradient& grad) {
  for (std::size_t k = 0; k < net.depth(); ++k) {
    Layer& layer = net.mutable_layer(k);
    if (const auto* adam = std::get_if<AdamHyper>(&config_)) {
      adam_step(adam_[2 * k], layer.weights.values(), grad[k].weights.values(), *adam);
      if (update_biases_) adam_step(adam_[2 * k + 1], layer.biases, grad[k].biases, *adam);
    } else {
      const auto& sgd = std::get<SgdHyper>(config_);
      sgd_step(layer.weights.values(), grad[k].weights.values(), sgd);
      if (update_biases_) sgd_step(layer.biases, grad[k].biases, sgd);
    }
  }
}

}  // namespace dropneuron
