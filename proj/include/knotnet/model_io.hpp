#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "knotnet/dataset.hpp"
#include "knotnet/encoding.hpp"
#include "knotnet/neuralnet.hpp"

namespace knotnet::model {

struct IncompatibleModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

// Self-describing trained model: everything prediction needs travels with
// the parameters, in particular the normalization statistics fitted during
// training and the augmentation settings that produced the training rows.
struct ModelFile {
  int format_version = kFormatVersion;
  dataset::Target target = dataset::Target::Quasipositivity;
  nn::NetworkSpec spec;
  nn::NetworkParams params;
  encoding::NormalizationStats stats;
  std::string slot_padding = "trailing";  // empty one-hot slots trail the word
  nn::TrainConfig train_config;
  int augment_reps = 32;
  std::uint64_t augment_seed = 0;
  std::string dataset_fingerprint;  // hash of the training table bytes
};

// Canonical JSON text (sorted keys, fixed indentation); saving and loading
// round-trips byte for byte.
std::string to_json_string(const ModelFile& model);
ModelFile from_json_string(const std::string& text);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

// FNV-1a over the raw bytes of a file, as a fixed-width hex string.
std::string fingerprint_file(const std::string& path);

}  // namespace knotnet::model
