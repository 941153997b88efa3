#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "dropneuron/dataset.hpp"
#include "dropneuron/matrix.hpp"

namespace dropneuron {

enum class LossKind { euclidean, softmax_xent, reconstruction_mse };

std::string_view to_string(LossKind k) noexcept;
std::optional<LossKind> parse_loss(std::string_view name) noexcept;

/// (1 / 2N) * sum_n ||y_n - yhat_n||^2.
double euclidean_loss(const Matrix& y, const Matrix& yhat);
/// Mean negative log-likelihood of the softmax of each row of `logits`.
double softmax_xent(const Matrix& logits, std::span<const int> classes);
/// sum (y - yhat)^2 / sum y^2 over all entries. Throws MetricError for all-zero y.
double nmse(const Matrix& y, const Matrix& yhat);
/// Fraction of rows whose argmax equals the label.
double accuracy(const Matrix& logits, std::span<const int> classes);

/// Data term of the cost for `output` against the batch's targets or labels.
double data_loss(LossKind loss, const Matrix& output, const Dataset& batch);
/// d(data_loss)/d(output), same shape as output.
Matrix data_loss_grad(LossKind loss, const Matrix& output, const Dataset& batch);

}  // namespace dropneuron
