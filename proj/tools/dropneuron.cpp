// dropneuron command-line tool: train, prune, compact, eval, trials, gen-data.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dropneuron/compression.hpp"
#include "dropneuron/config.hpp"
#include "dropneuron/errors.hpp"
#include "dropneuron/experiment.hpp"
#include "dropneuron/model_io.hpp"
#include "dropneuron/report.hpp"

namespace fs = std::filesystem;
using namespace dropneuron;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kDivergence = 4,
  kDegenerate = 5,
};

struct Options {
  std::string config;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::size_t trials = 1;
};

ExperimentConfig load_with_overrides(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output.dir = o.out;
  return c;
}

// The config a model should be evaluated with: --config wins, then the
// copy embedded in the model file.
ExperimentConfig config_for_model(const Options& o, const ModelFile& m) {
  if (!o.config.empty()) return load_with_overrides(o);
  if (!m.provenance.config) {
    throw ConfigError("model has no embedded config; pass --config to name its dataset");
  }
  ExperimentConfig c = *m.provenance.config;
  if (o.seed) c.seed = *o.seed;
  return c;
}

Dataset model_view(const ModelFile& m, const Dataset& data) {
  Dataset d = data;
  if (!m.input_map.empty()) {
    for (std::size_t i : m.input_map) {
      if (i >= data.inputs.cols()) {
        throw DimensionError("input_map refers to input " + std::to_string(i) + " but the data has " +
                             std::to_string(data.inputs.cols()) + " features");
      }
    }
    d.inputs = restrict_inputs(data.inputs, m.input_map);
  }
  if (d.inputs.cols() != m.net.input_dim()) {
    throw DimensionError("model expects " + std::to_string(m.net.input_dim()) + " inputs, data has " +
                         std::to_string(d.inputs.cols()));
  }
  if (d.task != TaskKind::classification && d.targets.cols() != m.net.output_dim()) {
    throw DimensionError("model produces " + std::to_string(m.net.output_dim()) + " outputs, data has " +
                         std::to_string(d.targets.cols()) + " targets");
  }
  return d;
}

fs::path sibling(const fs::path& model, const std::string& suffix) {
  fs::path p = model;
  p.replace_filename(model.stem().string() + suffix);
  return p;
}

int cmd_train(const Options& o) {
  const ExperimentConfig c = load_with_overrides(o);
  const RunResult r = run_experiment(c);
  write_run(c, r, c.output.dir);
  std::cout << format_report(r.report, c.name, metric_name(c.loss));
  if (!r.compact_error.empty()) std::cout << "compaction skipped: " << r.compact_error << "\n";
  std::cout << "run directory: " << c.output.dir.string() << "\n";
  return kOk;
}

int cmd_prune(const Options& o) {
  ModelFile m = load_model(o.model);
  PruneSpec spec;
  spec.threshold = o.threshold.value_or(spec.threshold);
  spec.validate(m.net.depth());

  ModelFile out = m;
  out.net = prune(m.net, spec);
  out.provenance.stage = "pruned";
  out.provenance.prune_threshold = spec.threshold;
  const fs::path path = o.out.empty() ? sibling(o.model, ".pruned.json") : fs::path(o.out);
  save_model(out, path);

  const NeuronSurvival survival = analyze_neurons(out.net);
  double before = 0.0, after = 0.0;
  std::string metric = "metric";
  const bool have_data = !o.config.empty() || m.provenance.config.has_value();
  if (have_data) {
    const ExperimentConfig c = config_for_model(o, m);
    const Dataset test = model_view(m, prepare_data(c).test);
    metric = metric_name(c.loss);
    before = evaluate_metric(m.net, test, c.loss);
    after = evaluate_metric(out.net, test, c.loss);
  }
  const CompressionReport rep = compression_stats(m.net, out.net, survival, before, after);
  write_text(sibling(path, ".report.txt"), format_report(rep, path.stem().string(), metric));
  write_text(sibling(path, ".report.kv"), report_key_values(rep, metric));

  std::cout << "pruned model: " << path.string() << "\n";
  std::cout << "nonzero weights: " << rep.weights_total.nonzero << " / " << rep.weights_total.total << "\n";
  std::cout << "compression rate: " << sig6(rep.compression_rate) << "\n";
  if (have_data) {
    std::cout << metric << " no_prune=" << sig6(before) << " pruned=" << sig6(after) << "\n";
  }
  return kOk;
}

int cmd_compact(const Options& o) {
  const ModelFile m = load_model(o.model);
  CompactResult cr = compact(m.net);
  ModelFile out = m;
  out.net = std::move(cr.net);
  out.provenance.stage = "compacted";
  // Compose with an existing map so indices always refer to the original inputs.
  out.input_map = cr.index_maps.front();
  if (!m.input_map.empty()) {
    for (auto& i : out.input_map) i = m.input_map[i];
  }
  const fs::path path = o.out.empty() ? sibling(o.model, ".compacted.json") : fs::path(o.out);
  save_model(out, path);

  nlohmann::ordered_json maps;
  maps["inputs"] = out.input_map;
  for (std::size_t p = 1; p < cr.index_maps.size(); ++p) maps["position" + std::to_string(p)] = cr.index_maps[p];
  write_text(sibling(path, ".index_maps.json"), maps.dump() + "\n");

  std::cout << "compacted model: " << path.string() << "\narchitecture:";
  for (std::size_t d : out.net.dims()) std::cout << ' ' << d;
  std::cout << "\nkept inputs (1-based):";
  for (std::size_t i : out.input_map) std::cout << ' ' << i + 1;
  std::cout << "\n";
  return kOk;
}

int cmd_eval(const Options& o) {
  const ModelFile m = load_model(o.model);
  const ExperimentConfig c = config_for_model(o, m);
  const Dataset test = model_view(m, prepare_data(c).test);
  const double v = evaluate_metric(m.net, test, c.loss);
  std::printf("metric=%s value=%.17g n=%zu stage=%s\n", metric_name(c.loss).c_str(), v, test.size(),
              m.provenance.stage.c_str());
  return kOk;
}

int cmd_trials(const Options& o) {
  const ExperimentConfig c = load_with_overrides(o);
  if (c.data.kind != DataConfig::Kind::sparse_regression) {
    throw ConfigError("config field 'data.kind': trials need synthetic data (sparse_regression)");
  }
  const auto rows = run_trials(c, o.trials);
  const std::string metric = metric_name(c.loss);
  const fs::path path = o.out.empty() ? c.output.dir / "trials.csv" : fs::path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, trials_csv(rows, metric));
  const std::string summary = trials_summary(rows, metric);
  write_text(sibling(path, ".summary.txt"), summary);
  std::cout << summary << "trials csv: " << path.string() << "\n";
  return kOk;
}

int cmd_gen_data(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  const PreparedData d = prepare_data(c);
  const fs::path dir = o.out.empty() ? c.output.dir / "data" : fs::path(o.out);
  fs::create_directories(dir);
  write_csv(d.train, dir / "train.csv");
  write_csv(d.test, dir / "test.csv");
  if (!d.x0.empty()) {
    std::string x0 = "index,x0\n";
    char buf[64];
    for (std::size_t i = 0; i < d.x0.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, d.x0[i]);
      x0 += buf;
    }
    write_text(dir / "x0.csv", x0);
  }
  std::cout << "wrote " << d.train.size() << " train and " << d.test.size() << " test rows to " << dir.string()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DropNeuron: group-sparse training, pruning and compaction of small networks"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "train, prune and compact one config; writes a run directory");
  train->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", o.seed, "override the config seed");
  train->add_option("--out", o.out, "run directory (default: output.dir of the config)");

  auto* prune = app.add_subcommand("prune", "zero weights below a threshold and report the metric before/after");
  prune->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  prune->add_option("--threshold", o.threshold, "magnitude threshold (default 0.01)");
  prune->add_option("--config", o.config, "config naming the evaluation data (default: embedded)");
  prune->add_option("--seed", o.seed, "override the data seed");
  prune->add_option("--out", o.out, "output model path");

  auto* compact = app.add_subcommand("compact", "remove dead neurons; writes the smaller model and index maps");
  compact->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  compact->add_option("--out", o.out, "output model path");

  auto* eval = app.add_subcommand("eval", "evaluate a model on the test split of its config");
  eval->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--config", o.config, "config naming the evaluation data (default: embedded)");
  eval->add_option("--seed", o.seed, "override the data seed");

  auto* trials = app.add_subcommand("trials", "independent seeded repetitions of a synthetic config");
  trials->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  trials->add_option("--trials", o.trials, "number of trials")->check(CLI::NonNegativeNumber);
  trials->add_option("--seed", o.seed, "seed of trial 0");
  trials->add_option("--out", o.out, "CSV path (default: <output.dir>/trials.csv)");

  auto* gen = app.add_subcommand("gen-data", "write the train/test split of a config as CSV");
  gen->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--seed", o.seed, "override the config seed");
  gen->add_option("--out", o.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(o);
    if (*prune) return cmd_prune(o);
    if (*compact) return cmd_compact(o);
    if (*eval) return cmd_eval(o);
    if (*trials) return cmd_trials(o);
    if (*gen) return cmd_gen_data(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const DegenerateNetworkError& e) {
    std::cerr << "degenerate network: " << e.what() << "\n";
    return kDegenerate;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const MetricError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
