#pragma once

#include "dropneuron/dataset.hpp"
#include "dropneuron/losses.hpp"
#include "dropneuron/network.hpp"
#include "dropneuron/regularizers.hpp"

namespace dropneuron {

/// Data loss plus every active penalty, evaluated with the deterministic forward.
double total_cost(const Network& net, const Dataset& batch, LossKind loss, const RegularizerConfig& reg);

struct BackpropResult {
  Gradient grad;
  /// Data term on this batch (under the supplied masks).
  double data_loss = 0.0;
};

/// Reverse-mode gradient of data_loss + penalties w.r.t. every weight and bias.
/// When `masks` is given, the forward pass uses them and the same mask gates
/// the backward signal through each masked activation.
BackpropResult backprop(const Network& net, const Dataset& batch, LossKind loss, const RegularizerConfig& reg,
                        const DropoutMasks* masks = nullptr);

}  // namespace dropneuron
