#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dropneuron/dataset.hpp"
#include "dropneuron/losses.hpp"
#include "dropneuron/network.hpp"
#include "dropneuron/optimizer.hpp"
#include "dropneuron/regularizers.hpp"

namespace dropneuron {

struct TrainConfig {
  OptimizerConfig optimizer = AdamHyper{};
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool train_biases = true;

  /// Throws ArgumentError on lr <= 0, betas outside [0, 1) or batch_size == 0.
  void validate() const;
};

/// Costs at the end of one epoch, on the full training set with the
/// deterministic forward. Epoch 0 is the initial network.
struct EpochRecord {
  std::size_t epoch = 0;
  double cost = 0.0;
  double data_loss = 0.0;
  PenaltyBreakdown penalties;
  std::optional<double> test_metric;
};

struct TrainRecord {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  Network net;
  TrainRecord record;
};

/// NMSE for regression/reconstruction, accuracy for classification.
double evaluate_metric(const Network& net, const Dataset& data, LossKind loss);

/// Minibatch training. Every random choice (shuffle order, dropout masks)
/// comes from Rng(config.seed), so runs are reproducible bit for bit.
/// Throws DivergenceError if the cost becomes non-finite.
TrainResult train(Network net, const Dataset& train_set, const Dataset* test_set, LossKind loss,
                  const RegularizerConfig& reg, const DropoutSpec& dropout, const TrainConfig& config);

}  // namespace dropneuron
