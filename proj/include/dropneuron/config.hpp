#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dropneuron/compression.hpp"
#include "dropneuron/dataset.hpp"
#include "dropneuron/losses.hpp"
#include "dropneuron/network.hpp"
#include "dropneuron/regularizers.hpp"
#include "dropneuron/train.hpp"

namespace dropneuron {

inline constexpr int kConfigVersion = 1;

/// MNIST subset: load, optionally subsample and downscale, then split by row.
struct MnistSource {
  std::filesystem::path images;
  std::filesystem::path labels;
  std::size_t subsample = 0;  // 0 keeps every image
  std::size_t downscale = 1;
  std::size_t n_train = 0;
  std::size_t n_test = 0;  // 0 takes the remaining rows
  TaskKind task = TaskKind::reconstruction;
};

struct DataConfig {
  enum class Kind { sparse_regression, mnist };
  Kind kind = Kind::sparse_regression;
  SparseRegressionSpec synthetic;
  MnistSource mnist;
};

struct OutputConfig {
  std::filesystem::path dir = "runs/default";
  /// Also write |w| grayscale images next to the 0/1 sparsity patterns.
  bool weight_images = false;
};

/// Everything needed to reproduce one run. The seed is the root of all
/// randomness: data, initialization and training each get their own stream.
struct ExperimentConfig {
  int version = kConfigVersion;
  std::string name = "experiment";
  std::uint64_t seed = 0;
  DataConfig data;
  std::vector<std::size_t> dims;
  std::vector<Activation> activations;
  LossKind loss = LossKind::euclidean;
  RegularizerConfig regularizer;
  DropoutSpec dropout;
  TrainConfig train;
  PruneSpec prune;
  OutputConfig output;

  /// Cross-field checks (dims vs activations, loss vs task, ...). Throws ConfigError.
  void validate() const;
};

/// Regularizer coefficients used when the config omits them.
RegularizerConfig default_regularizer();

/// Parses JSON text. Syntax errors name line and column, schema errors the
/// dotted field path. Relative MNIST paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
std::string dump_config(const ExperimentConfig& config);

/// FNV-1a of the canonical dump, ignoring the output section. 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace dropneuron
