#pragma once

#include <cstddef>
#include <vector>

#include "dropneuron/network.hpp"

namespace dropneuron {

struct PruneSpec {
  double threshold = 1e-2;
  /// Optional per-layer thresholds; empty means `threshold` everywhere.
  std::vector<double> layer_thresholds;

  double threshold_for(std::size_t layer) const noexcept {
    return layer_thresholds.empty() ? threshold : layer_thresholds[layer];
  }
  void validate(std::size_t depth) const;
};

/// Copy of `net` with every weight and bias of magnitude below the threshold set to 0.
Network prune(const Network& net, const PruneSpec& spec);

/// Which neurons are still connected, judged on exact zeros.
///
/// Position 0 is the input layer, position k the output of layer k. An input
/// survives iff its outgoing row in the first weight matrix is nonzero; a
/// hidden neuron iff both its incoming column and outgoing row are nonzero.
/// Outputs always survive unless `drop_dead_outputs` was requested, but
/// `output_connected` always records which of them still have a nonzero
/// incoming column.
struct NeuronSurvival {
  std::vector<std::vector<bool>> alive;
  std::vector<bool> output_connected;

  std::size_t alive_count(std::size_t position) const;
  std::size_t total(std::size_t position) const { return alive.at(position).size(); }
  std::size_t output_connected_count() const;
};

NeuronSurvival analyze_neurons(const Network& net, bool drop_dead_outputs = false);

struct CompactResult {
  Network net;
  /// index_maps[p][new_index] = original index at activation position p.
  std::vector<std::vector<std::size_t>> index_maps;
};

/// Rebuilds the network without its non-surviving neurons. A removed neuron
/// whose incoming column is zero emits the constant act(bias); that constant
/// times its outgoing row is added to the next layer's bias first, so the
/// compacted net computes the same function on the surviving inputs.
/// Throws DegenerateNetworkError if some layer would be left empty.
CompactResult compact(const Network& net, bool drop_dead_outputs = false);

/// Picks the surviving input columns of `x` using an index map.
Matrix restrict_inputs(const Matrix& x, const std::vector<std::size_t>& input_map);

struct LayerWeightStats {
  std::size_t total = 0;
  std::size_t nonzero = 0;
  double fraction() const noexcept { return total == 0 ? 0.0 : static_cast<double>(nonzero) / total; }
};

struct NeuronStats {
  std::size_t alive = 0;
  std::size_t total = 0;
  double fraction() const noexcept { return total == 0 ? 0.0 : static_cast<double>(alive) / total; }
};

/// One row of the sparsity / neuron / compression summary tables.
struct CompressionReport {
  std::vector<LayerWeightStats> layers;
  LayerWeightStats weights_total;
  /// Per activation position, input first.
  std::vector<NeuronStats> neurons;
  NeuronStats neurons_total;
  /// Outputs that still have a nonzero incoming column.
  NeuronStats outputs_connected;
  std::size_t dense_weight_count = 0;
  /// Nonzero weights whose source and target neurons both survive.
  std::size_t surviving_weight_count = 0;
  double compression_rate = 1.0;
  double metric_before = 0.0;
  double metric_after = 0.0;
};

/// dense / surviving; +inf when nothing survives.
double compression_rate(std::size_t dense_weight_count, std::size_t surviving_weight_count);

CompressionReport compression_stats(const Network& dense_net, const Network& pruned_net,
                                    const NeuronSurvival& survival, double metric_before, double metric_after);

/// 0/1 indicator of the nonzero weights of layer `layer_index` (0-based).
Matrix sparsity_pattern(const Network& net, std::size_t layer_index);

}  // namespace dropneuron
