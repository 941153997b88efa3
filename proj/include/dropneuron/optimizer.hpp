#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dropneuron/network.hpp"

namespace dropneuron {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct SgdHyper {
  double lr = 1e-2;
};

using OptimizerConfig = std::variant<AdamHyper, SgdHyper>;

/// First/second moment estimates for one contiguous parameter block.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place; advances state.t.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, const AdamHyper& hyper);

void sgd_step(std::span<double> params, std::span<const double> grads, const SgdHyper& hyper);

/// Applies an OptimizerConfig to every weight and bias block of a network.
class NetworkOptimizer {
 public:
  NetworkOptimizer(const Network& net, OptimizerConfig config, bool update_biases = true);
  void step(Network& net, const Gradient& grad);

 private:
  OptimizerConfig config_;
  bool update_biases_;
  // Two blocks per layer: weights, then biases.
  std::vector<AdamState> adam_;
};

}  // namespace dropneuron
