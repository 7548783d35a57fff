#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotnet/braid.hpp"
#include "knotnet/encoding.hpp"

namespace knotnet::dataset {

struct FileNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientLabeledKnots : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownKnot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Target { Quasipositivity, SliceGenus, Tau };

std::string to_string(Target t);
Target target_from_string(const std::string& name);

// Labels may be absent independently of one another; absent means the value
// is not known, and such rows are prediction inputs only.
struct KnotLabels {
  std::optional<int> quasipositive;  // 0 or 1
  std::optional<int> slice_genus;
  std::optional<int> tau;

  bool operator==(const KnotLabels&) const = default;
};

struct KnotRecord {
  std::string name;
  braid::BraidWord word;
  encoding::FeatureVector features;
  KnotLabels labels;
};

struct RowError {
  std::size_t line;  // 1-based line number in the file
  std::string message;
};

struct LoadResult {
  std::vector<KnotRecord> records;
  std::vector<RowError> row_errors;
};

// Expected CSV header, in order: name, braid, the twelve feature columns,
// then qp, g4, tau.
std::string expected_csv_header();

// Loads the knot table. Malformed rows are reported per line and skipped;
// a missing file or wrong header aborts the load instead.
LoadResult load_csv(const std::string& path);

struct AugmentedRow {
  std::string name;
  int representative = 1;  // 1..reps; representative 1 is the original word
  braid::BraidWord word;
  encoding::FeatureVector features;
  KnotLabels labels;
  std::vector<double> encoded;
};

struct AugmentedDataset {
  std::vector<AugmentedRow> rows;
  encoding::NormalizationStats stats;  // stats the rows are encoded with
  std::uint64_t seed = 0;
  int reps = 1;

  // Re-encodes every row against new stats (used after fitting on a train
  // split only).
  void reencode(const encoding::NormalizationStats& new_stats);
};

struct AugmentOptions {
  int reps = 32;
  int moves_min = 6;
  int moves_max = 14;
  int distinct_retries = 10;
};

// Expands each knot to `reps` rows: the original word plus rewritten
// equivalents, each sharing the knot's features and labels. Rewrites are
// derived from the knot name and representative index, so output does not
// depend on row order. Duplicate representatives that survive the retry
// limit are kept and reported through `warnings`.
AugmentedDataset augment(const std::vector<KnotRecord>& records,
                         const AugmentOptions& options, std::uint64_t seed,
                         std::vector<std::string>* warnings = nullptr);

struct Split {
  std::vector<std::size_t> train;  // row indices into AugmentedDataset::rows
  std::vector<std::size_t> test;
};

bool has_label(const KnotLabels& labels, Target target);
double label_value(const KnotLabels& labels, Target target);

// Splits by knot, never by row: every representative of a test knot lands in
// test, every representative of any other labeled knot in train. Unlabeled
// knots appear in neither.
Split split_by_knot(const AugmentedDataset& data, Target target,
                    int test_knot_count, std::uint64_t seed);

struct MeanPrediction {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across representatives
  int representatives = 0;
};

// Aggregates a per-row predictor over all representatives of one knot.
MeanPrediction mean_prediction(
    const std::function<double(const AugmentedRow&)>& predict,
    const AugmentedDataset& data, const std::string& knot_name);

struct RelationViolation {
  std::size_t row;
  double genus_prediction = 0.0;
  double tau_prediction = 0.0;
};

struct RelationReport {
  std::size_t rows_checked = 0;
  // rows where round(genus) < |round(tau)|
  std::vector<RelationViolation> tau_violations;
  // rows where round(genus) < |s| / 2
  std::vector<RelationViolation> s_violations;
};

// Audits the predicted invariants against the inequalities g4 >= |tau| and
// g4 >= |s|/2 that the true values always satisfy.
RelationReport relation_check(
    const std::function<double(const AugmentedRow&)>& genus_predict,
    const std::function<double(const AugmentedRow&)>& tau_predict,
    const AugmentedDataset& data);

}  // namespace knotnet::dataset
