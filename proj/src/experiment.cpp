#include "dropneuron/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dropneuron/errors.hpp"
#include "dropneuron/model_io.hpp"
#include "dropneuron/report.hpp"

namespace dropneuron {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::size_t> iota_rows(std::size_t from, std::size_t count) {
  std::vector<std::size_t> rows(count);
  std::iota(rows.begin(), rows.end(), from);
  return rows;
}

}  // namespace

RunSeeds derive_seeds(std::uint64_t seed) {
  const Rng root(seed);
  return {root.stream(0).seed(), root.stream(1).seed(), root.stream(2).seed()};
}

std::string metric_name(LossKind loss) { return loss == LossKind::softmax_xent ? "accuracy" : "nmse"; }

PreparedData prepare_data(const ExperimentConfig& config) {
  Rng rng(derive_seeds(config.seed).data);
  PreparedData out;
  if (config.data.kind == DataConfig::Kind::sparse_regression) {
    auto gen = gen_sparse_regression(rng, config.data.synthetic);
    out.train = std::move(gen.train);
    out.test = std::move(gen.test);
    out.x0 = std::move(gen.x0);
  } else {
    const MnistSource& m = config.data.mnist;
    Dataset all = load_mnist(m.images, m.labels);
    if (m.subsample > 0) {
      if (m.subsample > all.size()) {
        throw ConfigError("config field 'data.subsample': " + std::to_string(m.subsample) + " exceeds the " +
                          std::to_string(all.size()) + " available images");
      }
      all = subsample(all, rng, m.subsample);
    }
    if (m.downscale > 1) all = downscale(all, m.downscale);
    if (m.task == TaskKind::reconstruction) all = as_reconstruction(all);
    const std::size_t n_test = m.n_test > 0 ? m.n_test : all.size() - std::min(all.size(), m.n_train);
    if (m.n_train + n_test > all.size() || n_test == 0) {
      throw ConfigError("config field 'data.n_train': " + std::to_string(m.n_train) + " + " + std::to_string(n_test) +
                        " rows requested from " + std::to_string(all.size()));
    }
    out.train = select_rows(all, iota_rows(0, m.n_train));
    out.test = select_rows(all, iota_rows(m.n_train, n_test));
  }
  out.train.name = config.name + "/train";
  out.test.name = config.name + "/test";
  return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const RunSeeds seeds = derive_seeds(config.seed);
  RunResult r;
  r.data = prepare_data(config);
  if (r.data.train.inputs.cols() != config.dims.front()) {
    throw DimensionError("data has " + std::to_string(r.data.train.inputs.cols()) + " features, network expects " +
                         std::to_string(config.dims.front()));
  }

  Rng init_rng(seeds.init);
  Network net = init_network(init_rng, config.dims, config.activations);
  TrainConfig tc = config.train;
  tc.seed = seeds.train;
  r.trained = train(std::move(net), r.data.train, &r.data.test, config.loss, config.regularizer, config.dropout, tc);

  r.pruned = prune(r.trained.net, config.prune);
  r.survival = analyze_neurons(r.pruned);
  const double before = evaluate_metric(r.trained.net, r.data.test, config.loss);
  const double after = evaluate_metric(r.pruned, r.data.test, config.loss);
  r.report = compression_stats(r.trained.net, r.pruned, r.survival, before, after);
  try {
    r.compacted = compact(r.pruned);
  } catch (const DegenerateNetworkError& e) {
    r.compact_error = e.what();
  }
  return r;
}

void write_run(const ExperimentConfig& config, const RunResult& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_text(dir / "config.json", dump_config(config));

  Provenance prov;
  prov.config_hash = config_hash(config);
  prov.seed = config.seed;
  prov.epochs = config.train.epochs;
  prov.config = config;

  prov.stage = "dense";
  save_model({run.trained.net, prov, {}}, dir / "model_dense.json");
  prov.stage = "pruned";
  prov.prune_threshold = config.prune.threshold;
  save_model({run.pruned, prov, {}}, dir / "model_pruned.json");
  if (run.compacted) {
    prov.stage = "compacted";
    save_model({run.compacted->net, prov, run.compacted->index_maps.front()}, dir / "model_compacted.json");
    nlohmann::ordered_json maps;
    for (std::size_t p = 0; p < run.compacted->index_maps.size(); ++p) {
      const std::string key = p == 0 ? "inputs" : "position" + std::to_string(p);
      maps[key] = run.compacted->index_maps[p];
    }
    write_text(dir / "index_maps.json", maps.dump() + "\n");
  }

  write_text(dir / "train_record.csv", train_record_csv(run.trained.record));

  const std::string metric = metric_name(config.loss);
  std::string table = format_report(run.report, config.name, metric);
  if (run.compacted) {
    table += "compacted architecture:";
    for (std::size_t d : run.compacted->net.dims()) table += " " + std::to_string(d);
    table += "\n";
  } else {
    table += "compacted architecture: none (" + run.compact_error + ")\n";
  }
  write_text(dir / "report.txt", table);
  write_text(dir / "report.kv", report_key_values(run.report, metric));

  for (std::size_t k = 0; k < run.pruned.depth(); ++k) {
    const std::string n = std::to_string(k + 1);
    write_text(dir / ("sparsity_layer" + n + ".pgm"), sparsity_pgm(run.pruned.layer(k).weights));
    if (config.output.weight_images) {
      write_text(dir / ("weights_layer" + n + ".pgm"), magnitude_pgm(run.pruned.layer(k).weights));
    }
  }
}

SupportCheck check_support(const Network& pruned, const NeuronSurvival& survival, const std::vector<double>& x0) {
  SupportCheck c;
  if (x0.empty() || pruned.output_dim() != 1 || x0.size() != pruned.input_dim()) return c;
  for (const Layer& l : pruned.layers()) {
    if (l.activation != Activation::linear) return c;
  }
  c.applicable = true;
  Matrix product = pruned.layer(0).weights;
  for (std::size_t k = 1; k < pruned.depth(); ++k) product = matmul(product, pruned.layer(k).weights);

  c.support_match = true;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const bool in_support = x0[i] != 0.0;
    if (in_support != static_cast<bool>(survival.alive[0][i])) c.support_match = false;
    if (in_support) c.max_rel_error = std::max(c.max_rel_error, std::abs(product(i, 0) - x0[i]) / std::abs(x0[i]));
  }
  return c;
}

TrialRow run_trial(const ExperimentConfig& config, std::size_t trial) {
  ExperimentConfig c = config;
  c.seed = config.seed + trial;
  TrialRow row;
  row.trial = trial;
  row.seed = c.seed;
  try {
    const RunResult r = run_experiment(c);
    row.metric_no_prune = r.report.metric_before;
    row.metric_pruned = r.report.metric_after;
    row.inputs_alive = r.survival.alive_count(0);
    for (std::size_t p = 1; p + 1 < r.survival.alive.size(); ++p) {
      row.hidden_alive += r.survival.alive_count(p);
      row.hidden_total += r.survival.total(p);
    }
    row.compression_rate = r.report.compression_rate;
    row.support = check_support(r.pruned, r.survival, r.data.x0);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<TrialRow> run_trials(const ExperimentConfig& config, std::size_t n_trials) {
  std::vector<TrialRow> rows;
  rows.reserve(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) rows.push_back(run_trial(config, t));
  return rows;
}

std::string trials_csv(const std::vector<TrialRow>& rows, std::string_view metric) {
  std::ostringstream os;
  os << "trial,seed,status," << metric << "_no_prune," << metric
     << "_pruned,inputs_alive,hidden_alive,hidden_total,compression_rate,support_match,coef_max_rel_error\n";
  for (const TrialRow& r : rows) {
    os << r.trial << ',' << r.seed << ',' << (r.ok() ? std::string("ok") : csv_quote(r.error)) << ',';
    if (r.ok()) {
      os << full(r.metric_no_prune) << ',' << full(r.metric_pruned) << ',' << r.inputs_alive << ','
         << r.hidden_alive << ',' << r.hidden_total << ',' << full(r.compression_rate) << ',';
      if (r.support.applicable) os << (r.support.support_match ? 1 : 0) << ',' << full(r.support.max_rel_error);
      else os << ',';
    } else {
      os << ",,,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string trials_summary(const std::vector<TrialRow>& rows, std::string_view metric) {
  std::vector<double> m;
  std::size_t failed = 0;
  std::size_t recovered = 0;
  std::size_t applicable = 0;
  for (const TrialRow& r : rows) {
    if (!r.ok()) {
      ++failed;
      continue;
    }
    m.push_back(r.metric_pruned);
    if (r.support.applicable) {
      ++applicable;
      recovered += r.support.support_match;
    }
  }
  std::ostringstream os;
  os << "trials=" << rows.size() << "\n";
  os << "failed=" << failed << "\n";
  if (!m.empty()) {
    os << metric << "_pruned_median=" << full(median(m)) << "\n";
    os << metric << "_pruned_mean=" << full(std::accumulate(m.begin(), m.end(), 0.0) / m.size()) << "\n";
  }
  if (applicable > 0) {
    os << "support_recovered=" << recovered << "/" << applicable << "\n";
  }
  return os.str();
}

}  // namespace dropneuron
