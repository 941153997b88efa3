#include "dropneuron/compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dropneuron/errors.hpp"

namespace dropneuron {

void PruneSpec::validate(std::size_t depth) const {
  if (!(threshold >= 0.0)) throw ArgumentError("prune threshold must be non-negative");
  if (!layer_thresholds.empty()) {
    if (layer_thresholds.size() != depth) {
      throw ArgumentError("prune: " + std::to_string(layer_thresholds.size()) + " layer thresholds for " +
                          std::to_string(depth) + " layers");
    }
    for (double t : layer_thresholds) {
      if (!(t >= 0.0)) throw ArgumentError("prune threshold must be non-negative");
    }
  }
}

Network prune(const Network& net, const PruneSpec& spec) {
  spec.validate(net.depth());
  std::vector<Layer> layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const double t = spec.threshold_for(k);
    for (double& w : layers[k].weights.values()) {
      if (std::abs(w) < t) w = 0.0;
    }
    for (double& b : layers[k].biases) {
      if (std::abs(b) < t) b = 0.0;
    }
  }
  return Network(std::move(layers));
}

std::size_t NeuronSurvival::alive_count(std::size_t position) const {
  const auto& a = alive.at(position);
  return static_cast<std::size_t>(std::count(a.begin(), a.end(), true));
}

std::size_t NeuronSurvival::output_connected_count() const {
  return static_cast<std::size_t>(std::count(output_connected.begin(), output_connected.end(), true));
}

namespace {

bool row_nonzero(const Matrix& w, std::size_t i) {
  return std::ranges::any_of(w.row(i), [](double v) { return v != 0.0; });
}

bool column_nonzero(const Matrix& w, std::size_t j) {
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (w(i, j) != 0.0) return true;
  }
  return false;
}

}  // namespace

NeuronSurvival analyze_neurons(const Network& net, bool drop_dead_outputs) {
  const std::size_t depth = net.depth();
  NeuronSurvival s;
  s.alive.resize(depth + 1);

  const Matrix& first = net.layer(0).weights;
  for (std::size_t i = 0; i < first.rows(); ++i) s.alive[0].push_back(row_nonzero(first, i));

  for (std::size_t p = 1; p < depth; ++p) {
    const Matrix& in = net.layer(p - 1).weights;
    const Matrix& out = net.layer(p).weights;
    for (std::size_t j = 0; j < in.cols(); ++j) s.alive[p].push_back(column_nonzero(in, j) && row_nonzero(out, j));
  }

  const Matrix& last = net.layer(depth - 1).weights;
  for (std::size_t j = 0; j < last.cols(); ++j) {
    const bool connected = column_nonzero(last, j);
    s.output_connected.push_back(connected);
    s.alive[depth].push_back(drop_dead_outputs ? connected : true);
  }
  return s;
}

CompactResult compact(const Network& net, bool drop_dead_outputs) {
  const std::size_t depth = net.depth();
  const NeuronSurvival survival = analyze_neurons(net, drop_dead_outputs);

  CompactResult result;
  result.index_maps.resize(depth + 1);
  for (std::size_t p = 0; p <= depth; ++p) {
    for (std::size_t i = 0; i < survival.alive[p].size(); ++i) {
      if (survival.alive[p][i]) result.index_maps[p].push_back(i);
    }
    if (result.index_maps[p].empty()) {
      const std::string where = p == 0 ? "input layer" : (p == depth ? "output layer" : "hidden layer " + std::to_string(p));
      throw DegenerateNetworkError("compact: no neuron survives in the " + where);
    }
  }

  // Fold the constant outputs of removed, input-disconnected hidden neurons
  // into the next layer's biases.
  std::vector<std::vector<double>> biases;
  for (const auto& l : net.layers()) biases.push_back(l.biases);
  for (std::size_t p = 1; p < depth; ++p) {
    const Layer& feeding = net.layer(p - 1);
    const Matrix& out = net.layer(p).weights;
    for (std::size_t i = 0; i < survival.alive[p].size(); ++i) {
      if (survival.alive[p][i] || column_nonzero(feeding.weights, i)) continue;
      const double constant = activate(feeding.activation, feeding.biases[i]);
      if (constant == 0.0) continue;
      auto row = out.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) biases[p][j] += constant * row[j];
    }
  }

  std::vector<Layer> layers;
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& rows = result.index_maps[k];
    const auto& cols = result.index_maps[k + 1];
    const Layer& src = net.layer(k);
    Layer dst{Matrix(rows.size(), cols.size()), std::vector<double>(cols.size()), src.activation};
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) dst.weights(r, c) = src.weights(rows[r], cols[c]);
    }
    for (std::size_t c = 0; c < cols.size(); ++c) dst.biases[c] = biases[k][cols[c]];
    layers.push_back(std::move(dst));
  }
  result.net = Network(std::move(layers));
  return result;
}

Matrix restrict_inputs(const Matrix& x, const std::vector<std::size_t>& input_map) {
  Matrix out(x.rows(), input_map.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < input_map.size(); ++c) {
      if (input_map[c] >= x.cols()) throw DimensionError("restrict_inputs: index map exceeds input width");
      out(r, c) = x(r, input_map[c]);
    }
  }
  return out;
}

double compression_rate(std::size_t dense_weight_count, std::size_t surviving_weight_count) {
  if (surviving_weight_count == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(dense_weight_count) / static_cast<double>(surviving_weight_count);
}

CompressionReport compression_stats(const Network& dense_net, const Network& pruned_net,
                                    const NeuronSurvival& survival, double metric_before, double metric_after) {
  if (dense_net.dims() != pruned_net.dims()) {
    throw DimensionError("compression_stats: dense and pruned networks differ in architecture");
  }
  if (survival.alive.size() != pruned_net.depth() + 1) {
    throw DimensionError("compression_stats: survival does not match the network depth");
  }
  CompressionReport r;
  r.dense_weight_count = dense_net.weight_count();
  for (std::size_t k = 0; k < pruned_net.depth(); ++k) {
    const Matrix& w = pruned_net.layer(k).weights;
    LayerWeightStats ls{w.size(), w.count_nonzero()};
    r.layers.push_back(ls);
    r.weights_total.total += ls.total;
    r.weights_total.nonzero += ls.nonzero;

    const auto& src_alive = survival.alive[k];
    const auto& dst_alive = survival.alive[k + 1];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      if (!src_alive[i]) continue;
      auto row = w.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) r.surviving_weight_count += dst_alive[j] && row[j] != 0.0;
    }
  }
  for (std::size_t p = 0; p < survival.alive.size(); ++p) {
    NeuronStats ns{survival.alive_count(p), survival.total(p)};
    r.neurons.push_back(ns);
    r.neurons_total.alive += ns.alive;
    r.neurons_total.total += ns.total;
  }
  r.outputs_connected = {survival.output_connected_count(), survival.output_connected.size()};
  r.compression_rate = compression_rate(r.dense_weight_count, r.surviving_weight_count);
  r.metric_before = metric_before;
  r.metric_after = metric_after;
  return r;
}

Matrix sparsity_pattern(const Network& net, std::size_t layer_index) {
  if (layer_index >= net.depth()) {
    throw ArgumentError("sparsity_pattern: layer " + std::to_string(layer_index) + " out of range for depth " +
                        std::to_string(net.depth()));
  }
  const Matrix& w = net.layer(layer_index).weights;
  Matrix out(w.rows(), w.cols());
  auto src = w.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] != 0.0 ? 1.0 : 0.0;
  return out;
}

}  // namespace dropneuron
