#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotnet/braid.hpp"

namespace knotnet::encoding {

inline constexpr int kSlotCount = 19;    // encodable word length
inline constexpr int kLetterDim = 12;    // one-hot width per slot
inline constexpr int kWordDim = kSlotCount * kLetterDim;  // 228
inline constexpr int kFeatureCount = 12;
inline constexpr int kInputDim = kWordDim + kFeatureCount;  // 240

struct WordTooLong : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedEncoding : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tabulated knot invariants fed to the networks alongside the braid word.
struct FeatureVector {
  // binary flags
  int alternating = 0;
  int fibered = 0;
  int positive_braid_closure = 0;
  int large = 0;
  int small = 0;
  // integer invariants
  int crossing_number = 0;
  int seifert_genus = 0;
  int braid_index = 0;
  int signature = 0;
  int arc_index = 0;
  int determinant = 0;
  int rasmussen_s = 0;

  std::array<double, kFeatureCount> as_array() const;
  bool operator==(const FeatureVector&) const = default;
};

// Column order used everywhere features are serialized.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "alternating", "fibered",      "positive_braid_closure", "large",
    "small",       "crossing_number", "seifert_genus",       "braid_index",
    "signature",   "arc_index",    "determinant",            "rasmussen_s"};

struct NormalizationStats {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> std{};
  bool operator==(const NormalizationStats&) const = default;
};

// Returns identity stats (mean 0, std 1), i.e. features pass through.
NormalizationStats identity_stats();

// 1-based index of a letter within a 12-wide one-hot block: generator k
// with sign e maps to k + 3 * (1 - e), so positive letters occupy 1..6 and
// negative letters 7..12.
int one_hot_index(const braid::BraidLetter& letter);

// 228-dimensional one-hot encoding; words shorter than 19 letters leave
// their trailing slots all-zero.
std::vector<double> encode_word(const braid::BraidWord& word);

// Inverse of encode_word. Throws MalformedEncoding if a slot has more than
// one hot entry, a non-0/1 value, or a gap before a populated slot.
braid::BraidWord decode_word(std::span<const double> encoded);

// Per-column mean and population standard deviation; any constant column
// gets std 1 so normalization maps it to zero.
NormalizationStats fit_normalization(std::span<const FeatureVector> rows);

std::array<double, kFeatureCount> apply_normalization(
    const FeatureVector& features, const NormalizationStats& stats);

// Full 240-dimensional network input: one-hot word block, then the
// normalized feature columns.
std::vector<double> encode_record(const braid::BraidWord& word,
                                  const FeatureVector& features,
                                  const NormalizationStats& stats);

}  // namespace knotnet::encoding
