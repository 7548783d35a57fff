#include "knotnet/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "knotnet/rng.hpp"

namespace knotnet::model {

namespace {

using nlohmann::json;

json spec_to_json(const nn::NetworkSpec& spec) {
  json j;
  j["layer_sizes"] = spec.layer_sizes;
  json acts = json::array();
  for (nn::Activation a : spec.activations) acts.push_back(nn::to_string(a));
  j["activations"] = acts;
  j["dropout_rates"] = spec.dropout_rates;
  return j;
}

nn::NetworkSpec spec_from_json(const json& j) {
  nn::NetworkSpec spec;
  spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  for (const auto& name : j.at("activations")) {
    spec.activations.push_back(
        nn::activation_from_string(name.get<std::string>()));
  }
  spec.dropout_rates = j.at("dropout_rates").get<std::vector<double>>();
  spec.validate();
  return spec;
}

json params_to_json(const nn::NetworkParams& params) {
  json layers = json::array();
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    json layer;
    layer["rows"] = params.weights[i].rows;
    layer["cols"] = params.weights[i].cols;
    layer["weights"] = params.weights[i].data;
    layer["biases"] = params.biases[i];
    layers.push_back(layer);
  }
  return layers;
}

nn::NetworkParams params_from_json(const json& j) {
  nn::NetworkParams params;
  for (const auto& layer : j) {
    nn::Matrix w(layer.at("rows").get<int>(), layer.at("cols").get<int>());
    w.data = layer.at("weights").get<std::vector<double>>();
    if (w.data.size() != static_cast<std::size_t>(w.rows) *
                             static_cast<std::size_t>(w.cols)) {
      throw IncompatibleModel("weight matrix size does not match its shape");
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(layer.at("biases").get<std::vector<double>>());
  }
  return params;
}

}  // namespace

std::string to_json_string(const ModelFile& model) {
  json j;
  j["format_version"] = model.format_version;
  j["target"] = dataset::to_string(model.target);
  j["spec"] = spec_to_json(model.spec);
  j["params"] = params_to_json(model.params);
  j["normalization"]["mean"] = model.stats.mean;
  j["normalization"]["std"] = model.stats.std;
  j["encoding"]["slot_count"] = encoding::kSlotCount;
  j["encoding"]["letter_dim"] = encoding::kLetterDim;
  j["encoding"]["input_dim"] = encoding::kInputDim;
  j["encoding"]["slot_padding"] = model.slot_padding;
  j["train"]["epochs"] = model.train_config.epochs;
  j["train"]["batch_size"] = model.train_config.batch_size;
  j["train"]["learning_rate"] = model.train_config.learning_rate;
  j["train"]["beta1"] = model.train_config.beta1;
  j["train"]["beta2"] = model.train_config.beta2;
  j["train"]["epsilon"] = model.train_config.epsilon;
  j["train"]["loss"] = nn::to_string(model.train_config.loss);
  j["train"]["seed"] = model.train_config.seed;
  j["augment"]["reps"] = model.augment_reps;
  j["augment"]["seed"] = model.augment_seed;
  j["dataset_fingerprint"] = model.dataset_fingerprint;
  // nlohmann::json orders object keys, so this text is canonical
  return j.dump(2) + "\n";
}

ModelFile from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IncompatibleModel(std::string("model file is not valid JSON: ") +
                            e.what());
  }
  try {
    ModelFile model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != kFormatVersion) {
      throw IncompatibleModel("unsupported model format version " +
                              std::to_string(model.format_version));
    }
    model.target =
        dataset::target_from_string(j.at("target").get<std::string>());
    model.spec = spec_from_json(j.at("spec"));
    model.params = params_from_json(j.at("params"));
    model.stats.mean = j.at("normalization")
                           .at("mean")
                           .get<std::array<double, encoding::kFeatureCount>>();
    model.stats.std = j.at("normalization")
                          .at("std")
                          .get<std::array<double, encoding::kFeatureCount>>();
    if (j.at("encoding").at("input_dim").get<int>() != encoding::kInputDim ||
        j.at("encoding").at("slot_count").get<int>() != encoding::kSlotCount ||
        j.at("encoding").at("letter_dim").get<int>() != encoding::kLetterDim) {
      throw IncompatibleModel("model was built for a different encoding");
    }
    model.slot_padding = j.at("encoding").at("slot_padding").get<std::string>();
    if (model.slot_padding != "trailing") {
      throw IncompatibleModel("unsupported slot padding: " +
                              model.slot_padding);
    }
    const json& t = j.at("train");
    model.train_config.epochs = t.at("epochs").get<int>();
    model.train_config.batch_size = t.at("batch_size").get<int>();
    model.train_config.learning_rate = t.at("learning_rate").get<double>();
    model.train_config.beta1 = t.at("beta1").get<double>();
    model.train_config.beta2 = t.at("beta2").get<double>();
    model.train_config.epsilon = t.at("epsilon").get<double>();
    model.train_config.loss =
        nn::loss_from_string(t.at("loss").get<std::string>());
    model.train_config.seed = t.at("seed").get<std::uint64_t>();
    model.augment_reps = j.at("augment").at("reps").get<int>();
    model.augment_seed = j.at("augment").at("seed").get<std::uint64_t>();
    model.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();

    const std::size_t depth = static_cast<std::size_t>(model.spec.depth());
    if (model.params.weights.size() != depth ||
        model.params.biases.size() != depth) {
      throw IncompatibleModel("parameter count does not match the spec");
    }
    for (std::size_t i = 0; i < depth; ++i) {
      if (model.params.weights[i].rows != model.spec.layer_sizes[i + 1] ||
          model.params.weights[i].cols != model.spec.layer_sizes[i] ||
          model.params.biases[i].size() !=
              static_cast<std::size_t>(model.spec.layer_sizes[i + 1])) {
        throw IncompatibleModel("layer " + std::to_string(i) +
                                " parameters do not match the spec");
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw IncompatibleModel(std::string("model file is missing fields: ") +
                            e.what());
  }
}

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write model file: " + path);
  }
  out << to_json_string(model);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

std::string fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for fingerprinting: " + path);
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(hex);
}

}  // namespace knotnet::model
