#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dropneuron/config.hpp"
#include "dropneuron/network.hpp"

namespace dropneuron {

inline constexpr int kModelVersion = 1;

struct Provenance {
  std::string stage = "dense";  // dense | pruned | compacted
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double prune_threshold = 0.0;
  /// The full experiment config, so a model can be evaluated on its own data.
  std::optional<ExperimentConfig> config;
};

/// A network plus where it came from. For compacted models `input_map` lists
/// the original input index of every kept input; empty means identity.
struct ModelFile {
  Network net;
  Provenance provenance;
  std::vector<std::size_t> input_map;
};

/// JSON text. Doubles are written in shortest round-trip form, so
/// parse_model(serialize_model(m)) reproduces every weight bit for bit.
std::string serialize_model(const ModelFile& model);
ModelFile parse_model(std::string_view text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace dropneuron
