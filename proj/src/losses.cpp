#include "dropneuron/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dropneuron/errors.hpp"

namespace dropneuron {

std::string_view to_string(LossKind k) noexcept {
  switch (k) {
    case LossKind::euclidean:
      return "euclidean";
    case LossKind::softmax_xent:
      return "softmax_xent";
    case LossKind::reconstruction_mse:
      return "reconstruction_mse";
  }
  return "euclidean";
}

std::optional<LossKind> parse_loss(std::string_view name) noexcept {
  if (name == "euclidean") return LossKind::euclidean;
  if (name == "softmax_xent") return LossKind::softmax_xent;
  if (name == "reconstruction_mse") return LossKind::reconstruction_mse;
  return std::nullopt;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

void check_classes(const Matrix& logits, std::span<const int> classes) {
  if (classes.size() != logits.rows()) {
    throw DimensionError("softmax_xent: " + std::to_string(logits.rows()) + " rows but " +
                         std::to_string(classes.size()) + " labels");
  }
  for (int c : classes) {
    if (c < 0 || static_cast<std::size_t>(c) >= logits.cols()) {
      throw ArgumentError("softmax_xent: class index " + std::to_string(c) + " outside [0, " +
                          std::to_string(logits.cols()) + ")");
    }
  }
}

// log sum_d exp(row_d), shifted by the row maximum.
double log_sum_exp(std::span<const double> row) {
  const double mx = *std::max_element(row.begin(), row.end());
  double s = 0.0;
  for (double v : row) s += std::exp(v - mx);
  return mx + std::log(s);
}

const Matrix& targets_for(LossKind loss, const Dataset& batch) {
  return loss == LossKind::reconstruction_mse ? batch.inputs : batch.targets;
}

}  // namespace

double euclidean_loss(const Matrix& y, const Matrix& yhat) {
  require_same_shape(y, yhat, "euclidean_loss");
  if (y.rows() == 0) return 0.0;
  double s = 0.0;
  auto a = y.values();
  auto b = yhat.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / (2.0 * static_cast<double>(y.rows()));
}

double softmax_xent(const Matrix& logits, std::span<const int> classes) {
  check_classes(logits, classes);
  if (logits.rows() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    auto row = logits.row(n);
    s += log_sum_exp(row) - row[classes[n]];
  }
  return s / static_cast<double>(logits.rows());
}

double nmse(const Matrix& y, const Matrix& yhat) {
  require_same_shape(y, yhat, "nmse");
  double num = 0.0;
  double den = 0.0;
  auto a = y.values();
  auto b = yhat.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  if (den == 0.0) throw MetricError("nmse: target is identically zero");
  return num / den;
}

double accuracy(const Matrix& logits, std::span<const int> classes) {
  check_classes(logits, classes);
  if (logits.rows() == 0) throw MetricError("accuracy: empty batch");
  std::size_t hits = 0;
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    auto row = logits.row(n);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    hits += best == classes[n];
  }
  return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

double data_loss(LossKind loss, const Matrix& output, const Dataset& batch) {
  if (loss == LossKind::softmax_xent) return softmax_xent(output, batch.labels);
  return euclidean_loss(targets_for(loss, batch), output);
}

Matrix data_loss_grad(LossKind loss, const Matrix& output, const Dataset& batch) {
  const double inv_n = output.rows() == 0 ? 0.0 : 1.0 / static_cast<double>(output.rows());
  Matrix g(output.rows(), output.cols());
  if (loss == LossKind::softmax_xent) {
    check_classes(output, batch.labels);
    for (std::size_t n = 0; n < output.rows(); ++n) {
      auto row = output.row(n);
      auto gr = g.row(n);
      const double lse = log_sum_exp(row);
      for (std::size_t d = 0; d < row.size(); ++d) gr[d] = std::exp(row[d] - lse) * inv_n;
      gr[batch.labels[n]] -= inv_n;
    }
    return g;
  }
  const Matrix& y = targets_for(loss, batch);
  require_same_shape(y, output, "data_loss_grad");
  auto yv = y.values();
  auto ov = output.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = (ov[i] - yv[i]) * inv_n;
  return g;
}

}  // namespace dropneuron
