#pragma once

#include <cstddef>
#include <vector>

#include "dropneuron/network.hpp"

namespace dropneuron {

/// Penalty coefficients for the four weight regularizers.
///
/// li penalizes the l2 norm of every neuron's incoming weight column, lo the
/// l2 norm of every neuron's outgoing weight row; summed over all layers these
/// are group-lasso terms that push whole neurons to zero.
struct RegularizerConfig {
  double lambda_l1 = 0.0;
  double lambda_l2 = 0.0;
  double lambda_li = 0.0;
  double lambda_lo = 0.0;
  /// Floor on group norms in the gradient denominator.
  double group_eps = 1e-8;
  bool include_bias_in_l1l2 = true;
  /// Optional per-layer multiplier on all four coefficients. Empty means 1 everywhere.
  std::vector<double> layer_scale;

  /// Throws ArgumentError on negative coefficients or group_eps <= 0.
  void validate(std::size_t depth) const;
  double scale_for(std::size_t k) const noexcept { return layer_scale.empty() ? 1.0 : layer_scale[k]; }
};

double l1_value(const Network& net, double lambda, bool include_bias = true,
                const std::vector<double>& layer_scale = {});
double l2_value(const Network& net, double lambda, bool include_bias = true,
                const std::vector<double>& layer_scale = {});
double li_value(const Network& net, double lambda, const std::vector<double>& layer_scale = {});
double lo_value(const Network& net, double lambda, const std::vector<double>& layer_scale = {});

struct PenaltyBreakdown {
  double l1 = 0.0;
  double l2 = 0.0;
  double li = 0.0;
  double lo = 0.0;
  double total() const noexcept { return l1 + l2 + li + lo; }
};

PenaltyBreakdown penalty_values(const Network& net, const RegularizerConfig& config);

/// Gradient of the total penalty. Exact zeros get a zero subgradient
/// (sign(0) = 0 and a zero group contributes nothing); other group norms are
/// floored at group_eps in the denominator.
Gradient regularizer_grad(const Network& net, const RegularizerConfig& config);
/// Same, accumulated into an existing gradient.
void accumulate_regularizer_grad(const Network& net, const RegularizerConfig& config, Gradient& grad);

struct GroupCounts {
  std::size_t nonzero_columns = 0;
  std::size_t nonzero_rows = 0;
};

/// Per layer: how many columns / rows have l2 norm strictly above threshold.
std::vector<GroupCounts> group_l0_counts(const Network& net, double threshold);

}  // namespace dropneuron
