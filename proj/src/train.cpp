#include "dropneuron/train.hpp"

#include <algorithm>
#include <cmath>

#include "dropneuron/backprop.hpp"
#include "dropneuron/errors.hpp"

namespace dropneuron {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ArgumentError("batch_size must be at least 1");
  if (const auto* adam = std::get_if<AdamHyper>(&optimizer)) {
    if (!(adam->lr > 0.0)) throw ArgumentError("learning rate must be positive");
    if (adam->beta1 < 0.0 || adam->beta1 >= 1.0 || adam->beta2 < 0.0 || adam->beta2 >= 1.0) {
      throw ArgumentError("Adam betas must lie in [0, 1)");
    }
    if (!(adam->eps > 0.0)) throw ArgumentError("Adam epsilon must be positive");
  } else if (!(std::get<SgdHyper>(optimizer).lr > 0.0)) {
    throw ArgumentError("learning rate must be positive");
  }
}

double evaluate_metric(const Network& net, const Dataset& data, LossKind loss) {
  const Matrix out = forward(net, data.inputs);
  if (loss == LossKind::softmax_xent || data.task == TaskKind::classification) return accuracy(out, data.labels);
  return nmse(loss == LossKind::reconstruction_mse ? data.inputs : data.targets, out);
}

namespace {

EpochRecord record_epoch(std::size_t epoch, const Network& net, const Dataset& train_set, const Dataset* test_set,
                         LossKind loss, const RegularizerConfig& reg) {
  EpochRecord r;
  r.epoch = epoch;
  try {
    r.data_loss = data_loss(loss, forward(net, train_set.inputs), train_set);
  } catch (const NumericError&) {
    throw DivergenceError(epoch);
  }
  r.penalties = penalty_values(net, reg);
  r.cost = r.data_loss + r.penalties.total();
  if (!std::isfinite(r.cost)) throw DivergenceError(epoch);
  if (test_set != nullptr && test_set->size() > 0) {
    try {
      r.test_metric = evaluate_metric(net, *test_set, loss);
    } catch (const MetricError&) {
      r.test_metric.reset();
    }
  }
  return r;
}

}  // namespace

TrainResult train(Network net, const Dataset& train_set, const Dataset* test_set, LossKind loss,
                  const RegularizerConfig& reg, const DropoutSpec& dropout, const TrainConfig& config) {
  config.validate();
  reg.validate(net.depth());
  dropout.validate(net.depth());
  train_set.validate();
  if (train_set.size() == 0) throw ArgumentError("train: empty training set");
  if (train_set.inputs.cols() != net.input_dim()) {
    throw DimensionError("train: dataset has " + std::to_string(train_set.inputs.cols()) +
                         " features, network expects " + std::to_string(net.input_dim()));
  }

  Rng rng(config.seed);
  NetworkOptimizer optimizer(net, config.optimizer, config.train_biases);
  TrainRecord record;
  record.epochs.push_back(record_epoch(0, net, train_set, test_set, loss, reg));

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const Dataset batch = select_rows(train_set, std::span(order).subspan(start, stop - start));
      try {
        if (dropout.active()) {
          const DropoutMasks masks = sample_dropout_masks(net, batch.size(), dropout, rng);
          optimizer.step(net, backprop(net, batch, loss, reg, &masks).grad);
        } else {
          optimizer.step(net, backprop(net, batch, loss, reg).grad);
        }
      } catch (const NumericError&) {
        throw DivergenceError(epoch);
      }
    }
    record.epochs.push_back(record_epoch(epoch, net, train_set, test_set, loss, reg));
  }
  return {std::move(net), std::move(record)};
}

}  // namespace dropneuron
