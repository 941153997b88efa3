#include "dropneuron/backprop.hpp"

#include "dropneuron/errors.hpp"

namespace dropneuron {

double total_cost(const Network& net, const Dataset& batch, LossKind loss, const RegularizerConfig& reg) {
  return data_loss(loss, forward(net, batch.inputs), batch) + penalty_values(net, reg).total();
}

BackpropResult backprop(const Network& net, const Dataset& batch, LossKind loss, const RegularizerConfig& reg,
                        const DropoutMasks* masks) {
  const std::size_t depth = net.depth();
  const std::size_t n = batch.size();
  if (n == 0) throw ArgumentError("backprop: empty batch");
  if (batch.inputs.cols() != net.input_dim()) {
    throw DimensionError("backprop: batch has " + std::to_string(batch.inputs.cols()) + " features, network expects " +
                         std::to_string(net.input_dim()));
  }
  if (masks != nullptr && masks->size() != depth + 1) {
    throw DimensionError("backprop: expected one mask slot per activation position");
  }
  auto mask_at = [&](std::size_t p) -> const Matrix* {
    if (masks == nullptr || (*masks)[p].empty()) return nullptr;
    return &(*masks)[p];
  };

  // h[p]: (masked) activation feeding layer p; z[k]/a[k]: pre/post activation of layer k.
  std::vector<Matrix> h(depth + 1);
  std::vector<Matrix> z(depth);
  std::vector<Matrix> a(depth);
  h[0] = batch.inputs;
  if (const Matrix* m = mask_at(0)) h[0] = hadamard(h[0], *m);
  for (std::size_t k = 0; k < depth; ++k) {
    const Layer& layer = net.layer(k);
    z[k] = matmul(h[k], layer.weights);
    add_row_vector(z[k], layer.biases);
    a[k] = z[k];
    for (double& v : a[k].values()) v = activate(layer.activation, v);
    h[k + 1] = a[k];
    if (const Matrix* m = mask_at(k + 1)) h[k + 1] = hadamard(h[k + 1], *m);
  }

  BackpropResult result{zero_gradient(net), data_loss(loss, h[depth], batch)};
  Matrix upstream = data_loss_grad(loss, h[depth], batch);

  for (std::size_t k = depth; k-- > 0;) {
    const Layer& layer = net.layer(k);
    // d/da = upstream * mask, then d/dz = d/da * act'(z).
    if (const Matrix* m = mask_at(k + 1)) upstream = hadamard(upstream, *m);
    Matrix& dz = upstream;
    {
      auto dv = dz.values();
      auto zv = z[k].values();
      auto av = a[k].values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= activation_derivative(layer.activation, zv[i], av[i]);
    }

    LayerGradient& g = result.grad[k];
    const Matrix& input = h[k];
    for (std::size_t r = 0; r < n; ++r) {
      auto in = input.row(r);
      auto d = dz.row(r);
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double xi = in[i];
        if (xi == 0.0) continue;
        auto gw = g.weights.row(i);
        for (std::size_t j = 0; j < d.size(); ++j) gw[j] += xi * d[j];
      }
      for (std::size_t j = 0; j < d.size(); ++j) g.biases[j] += d[j];
    }

    if (k > 0) {
      Matrix prev(n, layer.fan_in());
      for (std::size_t r = 0; r < n; ++r) {
        auto d = dz.row(r);
        auto p = prev.row(r);
        for (std::size_t i = 0; i < p.size(); ++i) {
          auto w = layer.weights.row(i);
          double s = 0.0;
          for (std::size_t j = 0; j < d.size(); ++j) s += w[j] * d[j];
          p[i] = s;
        }
      }
      upstream = std::move(prev);
    }
  }

  accumulate_regularizer_grad(net, reg, result.grad);
  return result;
}

}  // namespace dropneuron
