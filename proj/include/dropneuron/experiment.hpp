#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dropneuron/compression.hpp"
#include "dropneuron/config.hpp"
#include "dropneuron/train.hpp"

namespace dropneuron {

/// Seeds of the three independent streams of one run.
struct RunSeeds {
  std::uint64_t data = 0;
  std::uint64_t init = 0;
  std::uint64_t train = 0;
};
RunSeeds derive_seeds(std::uint64_t seed);

struct PreparedData {
  Dataset train;
  Dataset test;
  /// Ground truth of synthetic data; empty for MNIST.
  std::vector<double> x0;
};

PreparedData prepare_data(const ExperimentConfig& config);

/// "accuracy" for classification, "nmse" otherwise.
std::string metric_name(LossKind loss);

struct RunResult {
  PreparedData data;
  TrainResult trained;
  Network pruned;
  NeuronSurvival survival;
  CompressionReport report;
  std::optional<CompactResult> compacted;
  /// Why compaction was skipped, if it was.
  std::string compact_error;
};

/// Generate data, initialize, train, prune, analyze, compact.
RunResult run_experiment(const ExperimentConfig& config);

/// Writes every artifact of a run into `dir` (created if needed).
void write_run(const ExperimentConfig& config, const RunResult& run, const std::filesystem::path& dir);

/// Recovery check for a linear network on synthetic data: does the set of
/// surviving inputs equal supp(x0), and how far is the end-to-end weight
/// product from x0 on that support.
struct SupportCheck {
  bool applicable = false;
  bool support_match = false;
  double max_rel_error = 0.0;
};
SupportCheck check_support(const Network& pruned, const NeuronSurvival& survival, const std::vector<double>& x0);

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string error;  // empty when the trial completed
  double metric_no_prune = 0.0;
  double metric_pruned = 0.0;
  std::size_t inputs_alive = 0;
  std::size_t hidden_alive = 0;
  std::size_t hidden_total = 0;
  double compression_rate = 0.0;
  SupportCheck support;

  bool ok() const noexcept { return error.empty(); }
};

/// Trial t runs the config with seed config.seed + t, so trial 0 reproduces
/// a plain run. A failing trial is recorded, not rethrown.
TrialRow run_trial(const ExperimentConfig& config, std::size_t trial);
std::vector<TrialRow> run_trials(const ExperimentConfig& config, std::size_t n_trials);

std::string trials_csv(const std::vector<TrialRow>& rows, std::string_view metric);
/// Medians, means and survival fractions over the completed trials.
std::string trials_summary(const std::vector<TrialRow>& rows, std::string_view metric);

}  // namespace dropneuron
