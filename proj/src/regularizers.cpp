#include "dropneuron/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dropneuron/errors.hpp"

namespace dropneuron {

namespace {

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double scale_at(const std::vector<double>& s, std::size_t k) noexcept { return s.empty() ? 1.0 : s[k]; }

}  // namespace

void RegularizerConfig::validate(std::size_t depth) const {
  if (lambda_l1 < 0.0 || lambda_l2 < 0.0 || lambda_li < 0.0 || lambda_lo < 0.0) {
    throw ArgumentError("regularizer coefficients must be non-negative");
  }
  if (!(group_eps > 0.0)) throw ArgumentError("group_eps must be positive");
  if (!layer_scale.empty()) {
    if (layer_scale.size() != depth) {
      throw ArgumentError("layer_scale has " + std::to_string(layer_scale.size()) + " entries for " +
                          std::to_string(depth) + " layers");
    }
    for (double s : layer_scale) {
      if (s < 0.0) throw ArgumentError("layer_scale entries must be non-negative");
    }
  }
}

double l1_value(const Network& net, double lambda, bool include_bias, const std::vector<double>& layer_scale) {
  if (lambda == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& l = net.layer(k);
    double layer_sum = 0.0;
    for (double w : l.weights.values()) layer_sum += std::abs(w);
    if (include_bias) {
      for (double b : l.biases) layer_sum += std::abs(b);
    }
    s += scale_at(layer_scale, k) * layer_sum;
  }
  return lambda * s;
}

double l2_value(const Network& net, double lambda, bool include_bias, const std::vector<double>& layer_scale) {
  if (lambda == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& l = net.layer(k);
    double layer_sum = 0.0;
    for (double w : l.weights.values()) layer_sum += w * w;
    if (include_bias) {
      for (double b : l.biases) layer_sum += b * b;
    }
    s += scale_at(layer_scale, k) * layer_sum;
  }
  return lambda * s;
}

double li_value(const Network& net, double lambda, const std::vector<double>& layer_scale) {
  if (lambda == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Matrix& w = net.layer(k).weights;
    double layer_sum = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) layer_sum += column_norm(w, j);
    s += scale_at(layer_scale, k) * layer_sum;
  }
  return lambda * s;
}

double lo_value(const Network& net, double lambda, const std::vector<double>& layer_scale) {
  if (lambda == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Matrix& w = net.layer(k).weights;
    double layer_sum = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) layer_sum += row_norm(w, i);
    s += scale_at(layer_scale, k) * layer_sum;
  }
  return lambda * s;
}

PenaltyBreakdown penalty_values(const Network& net, const RegularizerConfig& config) {
  return {l1_value(net, config.lambda_l1, config.include_bias_in_l1l2, config.layer_scale),
          l2_value(net, config.lambda_l2, config.include_bias_in_l1l2, config.layer_scale),
          li_value(net, config.lambda_li, config.layer_scale),
          lo_value(net, config.lambda_lo, config.layer_scale)};
}

void accumulate_regularizer_grad(const Network& net, const RegularizerConfig& config, Gradient& grad) {
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const double l1 = config.lambda_l1 * config.scale_for(k);
    const double l2 = config.lambda_l2 * config.scale_for(k);
    const Layer& layer = net.layer(k);
    const Matrix& w = layer.weights;
    Matrix& g = grad[k].weights;

    if (l1 != 0.0 || l2 != 0.0) {
      auto wv = w.values();
      auto gv = g.values();
      for (std::size_t i = 0; i < wv.size(); ++i) gv[i] += l1 * sign(wv[i]) + 2.0 * l2 * wv[i];
      if (config.include_bias_in_l1l2) {
        for (std::size_t j = 0; j < layer.biases.size(); ++j) {
          grad[k].biases[j] += l1 * sign(layer.biases[j]) + 2.0 * l2 * layer.biases[j];
        }
      }
    }

    const double li = config.lambda_li * config.scale_for(k);
    if (li != 0.0) {
      for (std::size_t j = 0; j < w.cols(); ++j) {
        const double norm = column_norm(w, j);
        if (norm == 0.0) continue;
        const double f = li / std::max(norm, config.group_eps);
        for (std::size_t i = 0; i < w.rows(); ++i) g(i, j) += f * w(i, j);
      }
    }

    const double lo = config.lambda_lo * config.scale_for(k);
    if (lo != 0.0) {
      for (std::size_t i = 0; i < w.rows(); ++i) {
        const double norm = row_norm(w, i);
        if (norm == 0.0) continue;
        const double f = lo / std::max(norm, config.group_eps);
        auto wr = w.row(i);
        auto gr = g.row(i);
        for (std::size_t j = 0; j < wr.size(); ++j) gr[j] += f * wr[j];
      }
    }
  }
}

Gradient regularizer_grad(const Network& net, const RegularizerConfig& config) {
  Gradient g = zero_gradient(net);
  accumulate_regularizer_grad(net, config, g);
  return g;
}

std::vector<GroupCounts> group_l0_counts(const Network& net, double threshold) {
  if (threshold < 0.0) throw ArgumentError("group_l0_counts: threshold must be non-negative");
  std::vector<GroupCounts> out;
  for (const auto& l : net.layers()) {
    GroupCounts c;
    for (std::size_t j = 0; j < l.weights.cols(); ++j) c.nonzero_columns += column_norm(l.weights, j) > threshold;
    for (std::size_t i = 0; i < l.weights.rows(); ++i) c.nonzero_rows += row_norm(l.weights, i) > threshold;
    out.push_back(c);
  }
  return out;
}

}  // namespace dropneuron
