#include "dropneuron/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dropneuron/errors.hpp"

namespace dropneuron {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string type_name(const json& j) {
  if (j.is_number()) return "number";
  return j.type_name();
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers (usually typos) can be reported.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object, got " + type_name(j_));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number, got " + type_name(v));
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

  std::uint64_t count(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(key, "expected a non-negative integer, got " + (v.is_number() ? v.dump() : type_name(v)));
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : mark(key, fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false, got " + type_name(v));
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string, got " + type_name(v));
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : mark(key, fallback);
  }

  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return mark(key, std::vector<double>{});
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array, got " + type_name(v));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array, got " + type_name(v));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned()) fail(key + "[" + std::to_string(i) + "]", "expected a non-negative integer");
      out.push_back(v[i].get<std::size_t>());
    }
    return out;
  }

  Fields object(const std::string& key) { return Fields(raw(key), sub(key)); }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : sub(key);
    throw ConfigError("config field '" + where + "': " + what);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "unknown field");
    }
  }

 private:
  template <typename T>
  T mark(const std::string& key, T value) {
    seen_.insert(key);
    return value;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  // Absolute, so the copy written into a run directory still points at the data.
  if (p.empty() || p.is_absolute()) return p;
  return std::filesystem::absolute(base / p).lexically_normal();
}

MagnitudeDist read_magnitude(Fields f) {
  const std::string kind = f.text("kind");
  MagnitudeDist d;
  if (kind == "uniform") {
    d = MagnitudeDist::uniform(f.number("low"), f.number("high"));
    if (!(d.a < d.b)) f.fail("high", "must exceed low");
  } else if (kind == "gaussian") {
    d = MagnitudeDist::gaussian(f.number("mean", 0.0), f.number("stddev"));
    if (!(d.b > 0.0)) f.fail("stddev", "must be positive");
  } else {
    f.fail("kind", "expected \"uniform\" or \"gaussian\", got \"" + kind + "\"");
  }
  d.random_sign = f.boolean("random_sign", false);
  f.finish();
  return d;
}

ojson magnitude_json(const MagnitudeDist& d) {
  ojson j;
  if (d.kind == MagnitudeDist::Kind::uniform) {
    j["kind"] = "uniform";
    j["low"] = d.a;
    j["high"] = d.b;
  } else {
    j["kind"] = "gaussian";
    j["mean"] = d.a;
    j["stddev"] = d.b;
  }
  j["random_sign"] = d.random_sign;
  return j;
}

DataConfig read_data(Fields f, const std::filesystem::path& base_dir) {
  DataConfig d;
  const std::string kind = f.text("kind");
  if (kind == "sparse_regression") {
    d.kind = DataConfig::Kind::sparse_regression;
    SparseRegressionSpec& s = d.synthetic;
    s.n_features = f.count("n_features", s.n_features);
    s.nonzeros = f.count("nonzeros", s.nonzeros);
    s.n_train = f.count("n_train", s.n_train);
    s.n_test = f.count("n_test", s.n_test);
    s.noise_sigma = f.number("noise_sigma", s.noise_sigma);
    if (f.has("magnitude")) s.magnitude = read_magnitude(f.object("magnitude"));
    try {
      s.validate();
    } catch (const Error& e) {
      f.fail("", e.what());
    }
  } else if (kind == "mnist") {
    d.kind = DataConfig::Kind::mnist;
    MnistSource& m = d.mnist;
    m.images = resolve(f.text("images"), base_dir);
    m.labels = resolve(f.text("labels"), base_dir);
    m.subsample = f.count("subsample", 0);
    m.downscale = f.count("downscale", 1);
    m.n_train = f.count("n_train");
    m.n_test = f.count("n_test", 0);
    const std::string task = f.text("task", "reconstruction");
    if (task == "reconstruction") {
      m.task = TaskKind::reconstruction;
    } else if (task == "classification") {
      m.task = TaskKind::classification;
    } else {
      f.fail("task", "expected \"reconstruction\" or \"classification\", got \"" + task + "\"");
    }
    if (m.downscale == 0) f.fail("downscale", "must be at least 1");
    if (m.n_train == 0) f.fail("n_train", "must be positive");
  } else {
    f.fail("kind", "expected \"sparse_regression\" or \"mnist\", got \"" + kind + "\"");
  }
  f.finish();
  return d;
}

OptimizerConfig read_optimizer(Fields f) {
  const std::string kind = f.text("kind", "adam");
  OptimizerConfig out;
  if (kind == "adam") {
    AdamHyper h;
    h.lr = f.number("lr", h.lr);
    h.beta1 = f.number("beta1", h.beta1);
    h.beta2 = f.number("beta2", h.beta2);
    h.eps = f.number("eps", h.eps);
    out = h;
  } else if (kind == "sgd") {
    SgdHyper h;
    h.lr = f.number("lr", h.lr);
    out = h;
  } else {
    f.fail("kind", "expected \"adam\" or \"sgd\", got \"" + kind + "\"");
  }
  f.finish();
  return out;
}

ojson optimizer_json(const OptimizerConfig& o) {
  ojson j;
  if (const auto* a = std::get_if<AdamHyper>(&o)) {
    j["kind"] = "adam";
    j["lr"] = a->lr;
    j["beta1"] = a->beta1;
    j["beta2"] = a->beta2;
    j["eps"] = a->eps;
  } else {
    j["kind"] = "sgd";
    j["lr"] = std::get<SgdHyper>(o).lr;
  }
  return j;
}

// "line L, column C" for a byte offset into text.
std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RegularizerConfig default_regularizer() {
  RegularizerConfig r;
  r.lambda_l1 = 5e-5;
  r.lambda_li = 5e-5;
  r.lambda_lo = 5e-5;
  return r;
}

void ExperimentConfig::validate() const {
  if (version != kConfigVersion) {
    throw ConfigError("config field 'version': unsupported version " + std::to_string(version));
  }
  if (dims.size() < 2) throw ConfigError("config field 'network.dims': need at least input and output sizes");
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("config field 'network.dims': sizes must be positive");
  }
  if (activations.size() != dims.size() - 1) {
    throw ConfigError("config field 'network.activations': " + std::to_string(activations.size()) +
                      " entries for " + std::to_string(dims.size() - 1) + " layers");
  }
  const std::size_t depth = dims.size() - 1;
  auto wrap = [](const char* field, auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      throw ConfigError(std::string("config field '") + field + "': " + e.what());
    }
  };
  wrap("regularizer", [&] { regularizer.validate(depth); });
  wrap("dropout", [&] { dropout.validate(depth); });
  wrap("train", [&] { train.validate(); });
  wrap("prune", [&] { prune.validate(depth); });

  if (data.kind == DataConfig::Kind::sparse_regression) {
    if (dims.front() != data.synthetic.n_features) {
      throw ConfigError("config field 'network.dims': input size " + std::to_string(dims.front()) +
                        " does not match data.n_features " + std::to_string(data.synthetic.n_features));
    }
    if (dims.back() != 1) throw ConfigError("config field 'network.dims': sparse regression has one output");
    if (loss != LossKind::euclidean) throw ConfigError("config field 'loss': sparse regression uses euclidean");
  } else {
    const bool classify = data.mnist.task == TaskKind::classification;
    if (classify && loss != LossKind::softmax_xent) {
      throw ConfigError("config field 'loss': classification uses softmax_xent");
    }
    if (!classify && loss == LossKind::softmax_xent) {
      throw ConfigError("config field 'loss': softmax_xent needs a classification task");
    }
    if (!classify && dims.front() != dims.back()) {
      throw ConfigError("config field 'network.dims': a reconstruction network needs equal input and output sizes");
    }
  }
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  Fields root(j, "");
  ExperimentConfig c;
  c.version = static_cast<int>(root.count("version"));
  if (c.version != kConfigVersion) root.fail("version", "unsupported version " + std::to_string(c.version));
  c.name = root.text("name", c.name);
  c.seed = root.count("seed", 0);
  c.data = read_data(root.object("data"), base_dir);

  {
    Fields net = root.object("network");
    c.dims = net.counts("dims");
    const json& acts = net.raw("activations");
    if (!acts.is_array()) net.fail("activations", "expected an array, got " + type_name(acts));
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const std::string field = "activations[" + std::to_string(i) + "]";
      if (!acts[i].is_string()) net.fail(field, "expected a string");
      const auto a = parse_activation(acts[i].get<std::string>());
      if (!a) net.fail(field, "unknown activation \"" + acts[i].get<std::string>() + "\"");
      c.activations.push_back(*a);
    }
    net.finish();
  }

  {
    const std::string loss = root.text("loss");
    const auto l = parse_loss(loss);
    if (!l) root.fail("loss", "unknown loss \"" + loss + "\"");
    c.loss = *l;
  }

  c.regularizer = default_regularizer();
  if (root.has("regularizer")) {
    Fields r = root.object("regularizer");
    RegularizerConfig& g = c.regularizer;
    g.lambda_l1 = r.number("lambda_l1", g.lambda_l1);
    g.lambda_l2 = r.number("lambda_l2", g.lambda_l2);
    g.lambda_li = r.number("lambda_li", g.lambda_li);
    g.lambda_lo = r.number("lambda_lo", g.lambda_lo);
    g.group_eps = r.number("group_eps", g.group_eps);
    g.include_bias_in_l1l2 = r.boolean("include_bias_in_l1l2", g.include_bias_in_l1l2);
    g.layer_scale = r.numbers("layer_scale");
    r.finish();
  }

  if (root.has("dropout")) {
    Fields d = root.object("dropout");
    c.dropout.keep_prob = d.number("keep_prob");
    const json& at = d.raw("apply_to");
    if (at.is_string() && at.get<std::string>() == "hidden") {
      for (std::size_t p = 1; p + 1 < c.dims.size(); ++p) c.dropout.apply_to.push_back(p);
    } else {
      c.dropout.apply_to = d.counts("apply_to");
    }
    d.finish();
  }

  {
    Fields t = root.object("train");
    if (t.has("optimizer")) c.train.optimizer = read_optimizer(t.object("optimizer"));
    c.train.epochs = t.count("epochs", c.train.epochs);
    c.train.batch_size = t.count("batch_size", c.train.batch_size);
    c.train.shuffle = t.boolean("shuffle", c.train.shuffle);
    c.train.train_biases = t.boolean("train_biases", c.train.train_biases);
    t.finish();
  }

  if (root.has("prune")) {
    Fields p = root.object("prune");
    c.prune.threshold = p.number("threshold", c.prune.threshold);
    c.prune.layer_thresholds = p.numbers("layer_thresholds");
    p.finish();
  }

  if (root.has("output")) {
    Fields o = root.object("output");
    c.output.dir = o.text("dir", c.output.dir.string());
    c.output.weight_images = o.boolean("weight_images", c.output.weight_images);
    o.finish();
  }

  root.finish();
  c.validate();
  return c;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError("config syntax error at " + position(text, at) + ": " + msg);
  }
  return config_from_json(j, base_dir);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ojson config_to_json(const ExperimentConfig& c) {
  ojson j;
  j["version"] = c.version;
  j["name"] = c.name;
  j["seed"] = c.seed;

  ojson data;
  if (c.data.kind == DataConfig::Kind::sparse_regression) {
    const SparseRegressionSpec& s = c.data.synthetic;
    data["kind"] = "sparse_regression";
    data["n_features"] = s.n_features;
    data["nonzeros"] = s.nonzeros;
    data["n_train"] = s.n_train;
    data["n_test"] = s.n_test;
    data["noise_sigma"] = s.noise_sigma;
    data["magnitude"] = magnitude_json(s.magnitude);
  } else {
    const MnistSource& m = c.data.mnist;
    data["kind"] = "mnist";
    data["images"] = m.images.string();
    data["labels"] = m.labels.string();
    data["subsample"] = m.subsample;
    data["downscale"] = m.downscale;
    data["n_train"] = m.n_train;
    data["n_test"] = m.n_test;
    data["task"] = std::string(to_string(m.task));
  }
  j["data"] = data;

  ojson net;
  net["dims"] = c.dims;
  ojson acts = ojson::array();
  for (Activation a : c.activations) acts.push_back(std::string(to_string(a)));
  net["activations"] = acts;
  j["network"] = net;
  j["loss"] = std::string(to_string(c.loss));

  const RegularizerConfig& r = c.regularizer;
  j["regularizer"] = ojson{{"lambda_l1", r.lambda_l1},
                           {"lambda_l2", r.lambda_l2},
                           {"lambda_li", r.lambda_li},
                           {"lambda_lo", r.lambda_lo},
                           {"group_eps", r.group_eps},
                           {"include_bias_in_l1l2", r.include_bias_in_l1l2},
                           {"layer_scale", r.layer_scale}};
  if (c.dropout.active()) {
    j["dropout"] = ojson{{"keep_prob", c.dropout.keep_prob}, {"apply_to", c.dropout.apply_to}};
  }
  j["train"] = ojson{{"optimizer", optimizer_json(c.train.optimizer)},
                     {"epochs", c.train.epochs},
                     {"batch_size", c.train.batch_size},
                     {"shuffle", c.train.shuffle},
                     {"train_biases", c.train.train_biases}};
  j["prune"] = ojson{{"threshold", c.prune.threshold}, {"layer_thresholds", c.prune.layer_thresholds}};
  j["output"] = ojson{{"dir", c.output.dir.string()}, {"weight_images", c.output.weight_images}};
  return j;
}

std::string dump_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  ojson j = config_to_json(config);
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dropneuron
