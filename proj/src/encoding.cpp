#include "knotnet/encoding.hpp"

#include <cmath>

namespace knotnet::encoding {

std::array<double, kFeatureCount> FeatureVector::as_array() const {
  return {static_cast<double>(alternating),
          static_cast<double>(fibered),
          static_cast<double>(positive_braid_closure),
          static_cast<double>(large),
          static_cast<double>(small),
          static_cast<double>(crossing_number),
          static_cast<double>(seifert_genus),
          static_cast<double>(braid_index),
          static_cast<double>(signature),
          static_cast<double>(arc_index),
          static_cast<double>(determinant),
          static_cast<double>(rasmussen_s)};
}

NormalizationStats identity_stats() {
  NormalizationStats stats;
  stats.mean.fill(0.0);
  stats.std.fill(1.0);
  return stats;
}

int one_hot_index(const braid::BraidLetter& letter) {
  if (letter.generator < 1 || letter.generator > braid::kMaxGenerator) {
    throw braid::GeneratorOutOfRange("generator " +
                                     std::to_string(letter.generator) +
                                     " has no one-hot slot");
  }
  return letter.generator + 3 * (1 - letter.sign);
}

std::vector<double> encode_word(const braid::BraidWord& word) {
  if (word.letters.size() > static_cast<std::size_t>(kSlotCount)) {
    throw WordTooLong("word of length " + std::to_string(word.letters.size()) +
                      " exceeds the " + std::to_string(kSlotCount) +
                      "-slot encoding");
  }
  std::vector<double> out(kWordDim, 0.0);
  for (std::size_t i = 0; i < word.letters.size(); ++i) {
    out[i * kLetterDim + static_cast<std::size_t>(
                             one_hot_index(word.letters[i]) - 1)] = 1.0;
  }
  return out;
}

braid::BraidWord decode_word(std::span<const double> encoded) {
  if (encoded.size() < static_cast<std::size_t>(kWordDim)) {
    throw MalformedEncoding("expected at least " + std::to_string(kWordDim) +
                            " values, got " + std::to_string(encoded.size()));
  }
  braid::BraidWord word;
  bool seen_empty_slot = false;
  for (int slot = 0; slot < kSlotCount; ++slot) {
    int hot = 0;  // 1-based index of the hot entry, 0 if none
    for (int j = 0; j < kLetterDim; ++j) {
      const double v = encoded[static_cast<std::size_t>(slot * kLetterDim + j)];
      if (v == 0.0) continue;
      if (v != 1.0) {
        throw MalformedEncoding("slot " + std::to_string(slot + 1) +
                                " holds a value that is neither 0 nor 1");
      }
      if (hot != 0) {
        throw MalformedEncoding("slot " + std::to_string(slot + 1) +
                                " has more than one hot entry");
      }
      hot = j + 1;
    }
    if (hot == 0) {
      seen_empty_slot = true;
      continue;
    }
    if (seen_empty_slot) {
      throw MalformedEncoding("populated slot " + std::to_string(slot + 1) +
                              " after an empty slot");
    }
    const int generator = hot > braid::kMaxGenerator
                              ? hot - braid::kMaxGenerator
                              : hot;
    word.letters.push_back({generator, hot > braid::kMaxGenerator ? -1 : 1});
  }
  int max_gen = 1;
  for (const auto& letter : word.letters) {
    max_gen = std::max(max_gen, letter.generator);
  }
  word.strands = max_gen + 1;
  return word;
}

NormalizationStats fit_normalization(std::span<const FeatureVector> rows) {
  if (rows.empty()) {
    throw EmptyDataset("cannot fit normalization statistics on zero rows");
  }
  NormalizationStats stats;
  stats.mean.fill(0.0);
  stats.std.fill(0.0);
  for (const FeatureVector& row : rows) {
    const auto values = row.as_array();
    for (int j = 0; j < kFeatureCount; ++j) {
      stats.mean[static_cast<std::size_t>(j)] +=
          values[static_cast<std::size_t>(j)];
    }
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : stats.mean) m /= n;
  for (const FeatureVector& row : rows) {
    const auto values = row.as_array();
    for (int j = 0; j < kFeatureCount; ++j) {
      const double d = values[static_cast<std::size_t>(j)] -
                       stats.mean[static_cast<std::size_t>(j)];
      stats.std[static_cast<std::size_t>(j)] += d * d;
    }
  }
  for (double& s : stats.std) {
    s = std::sqrt(s / n);
    if (s == 0.0) s = 1.0;  // constant column: normalized value becomes 0
  }
  return stats;
}

std::array<double, kFeatureCount> apply_normalization(
    const FeatureVector& features, const NormalizationStats& stats) {
  std::array<double, kFeatureCount> out{};
  const auto values = features.as_array();
  for (int j = 0; j < kFeatureCount; ++j) {
    const auto i = static_cast<std::size_t>(j);
    out[i] = (values[i] - stats.mean[i]) / stats.std[i];
  }
  return out;
}

std::vector<double> encode_record(const braid::BraidWord& word,
                                  const FeatureVector& features,
                                  const NormalizationStats& stats) {
  std::vector<double> out = encode_word(word);
  out.reserve(kInputDim);
  for (double v : apply_normalization(features, stats)) {
    out.push_back(v);
  }
  return out;
}

}  // namespace knotnet::encoding
