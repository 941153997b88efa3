#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dropneuron/matrix.hpp"
#include "dropneuron/rng.hpp"
#include "dropneuron/sampling.hpp"

namespace dropneuron {

enum class TaskKind { regression, classification, reconstruction };

std::string_view to_string(TaskKind t) noexcept;

/// Paired examples. Regression and reconstruction tasks use `targets`;
/// classification uses `labels` and leaves `targets` empty.
struct Dataset {
  std::string name;
  TaskKind task = TaskKind::regression;
  Matrix inputs;
  Matrix targets;
  std::vector<int> labels;
  /// Image geometry when inputs are flattened images, else 0.
  std::size_t image_height = 0;
  std::size_t image_width = 0;

  std::size_t size() const noexcept { return inputs.rows(); }
  /// Throws DimensionError when row counts disagree.
  void validate() const;
};

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);
/// Reconstruction view: targets = inputs.
Dataset as_reconstruction(const Dataset& data);
/// k rows chosen uniformly without replacement.
Dataset subsample(const Dataset& data, Rng& rng, std::size_t k);
/// factor x factor average pooling of image inputs (targets follow for reconstruction).
Dataset downscale(const Dataset& data, std::size_t factor);

struct SparseRegressionSpec {
  std::size_t n_features = 20;
  std::size_t nonzeros = 2;
  std::size_t n_train = 500;
  std::size_t n_test = 500;
  double noise_sigma = 0.01;
  MagnitudeDist magnitude = MagnitudeDist::gaussian(0.0, 5.0);

  void validate() const;
};

struct SparseRegressionData {
  Dataset train;
  Dataset test;
  std::vector<double> x0;
};

/// y = Phi x0 + noise, with Phi's columns uniform on the unit sphere in
/// R^(n_train + n_test). Each row of Phi is one example; the first n_train
/// rows form the training split.
SparseRegressionData gen_sparse_regression(Rng& rng, const SparseRegressionSpec& spec);

/// Parses an MNIST images/labels IDX pair. Pixels are scaled to [0, 1].
Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels);
Dataset parse_mnist(std::span<const std::uint8_t> image_bytes, std::span<const std::uint8_t> label_bytes);

/// IDX encoders, the inverse of parse_mnist for images in [0, 1] that are multiples of 1/255.
std::vector<std::uint8_t> encode_idx_images(const Dataset& data);
std::vector<std::uint8_t> encode_idx_labels(const Dataset& data);

/// CSV with a header row; inputs x1..xn first, targets last.
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace dropneuron
