#include "dropneuron/model_io.hpp"

#include <fstream>
#include <sstream>

#include "dropneuron/errors.hpp"

namespace dropneuron {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw ParseError("model file: " + what, 0); }

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string serialize_model(const ModelFile& model) {
  ojson j;
  j["format"] = "dropneuron-model";
  j["version"] = kModelVersion;

  const Provenance& p = model.provenance;
  ojson prov;
  prov["stage"] = p.stage;
  prov["config_hash"] = p.config_hash;
  prov["seed"] = p.seed;
  prov["epochs"] = p.epochs;
  prov["prune_threshold"] = p.prune_threshold;
  if (p.config) prov["config"] = config_to_json(*p.config);
  j["provenance"] = prov;

  if (!model.input_map.empty()) j["input_map"] = model.input_map;

  ojson layers = ojson::array();
  for (const Layer& l : model.net.layers()) {
    ojson lj;
    lj["fan_in"] = l.fan_in();
    lj["fan_out"] = l.fan_out();
    lj["activation"] = std::string(to_string(l.activation));
    const auto w = l.weights.values();
    lj["weights"] = std::vector<double>(w.begin(), w.end());
    lj["biases"] = l.biases;
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j.dump(1) + "\n";
}

ModelFile parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("model file is not valid JSON", e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!j.is_object() || get<std::string>(j, "format") != "dropneuron-model") bad("not a dropneuron model");
  const int version = get<int>(j, "version");
  if (version != kModelVersion) bad("unsupported version " + std::to_string(version));

  ModelFile m;
  const json& prov = j.at("provenance");
  m.provenance.stage = get<std::string>(prov, "stage");
  m.provenance.config_hash = get<std::string>(prov, "config_hash");
  m.provenance.seed = get<std::uint64_t>(prov, "seed");
  m.provenance.epochs = get<std::size_t>(prov, "epochs");
  m.provenance.prune_threshold = get<double>(prov, "prune_threshold");
  if (prov.contains("config")) m.provenance.config = config_from_json(prov.at("config"));

  if (j.contains("input_map")) m.input_map = get<std::vector<std::size_t>>(j, "input_map");

  const json& layers = j.at("layers");
  if (!layers.is_array() || layers.empty()) bad("'layers' must be a non-empty array");
  std::vector<Layer> out;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const json& lj = layers[k];
    const auto fan_in = get<std::size_t>(lj, "fan_in");
    const auto fan_out = get<std::size_t>(lj, "fan_out");
    const auto act = parse_activation(get<std::string>(lj, "activation"));
    if (!act) bad("layer " + std::to_string(k) + ": unknown activation");
    const auto w = get<std::vector<double>>(lj, "weights");
    auto b = get<std::vector<double>>(lj, "biases");
    if (w.size() != fan_in * fan_out || b.size() != fan_out) {
      bad("layer " + std::to_string(k) + ": weight/bias count does not match fan_in x fan_out");
    }
    Matrix wm(fan_in, fan_out);
    std::copy(w.begin(), w.end(), wm.values().begin());
    out.push_back(Layer{std::move(wm), std::move(b), *act});
  }
  m.net = Network(std::move(out));
  if (!m.input_map.empty() && m.input_map.size() != m.net.input_dim()) {
    bad("input_map has " + std::to_string(m.input_map.size()) + " entries for " +
        std::to_string(m.net.input_dim()) + " inputs");
  }
  return m;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out << serialize_model(model);
  if (!out) throw IoError("write failed for " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace dropneuron
