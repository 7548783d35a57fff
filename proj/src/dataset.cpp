#include "knotnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "knotnet/neuralnet.hpp"
#include "knotnet/rng.hpp"

namespace knotnet::dataset {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

int parse_int(const std::string& text, const char* column) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::runtime_error(std::string(column) + " is not an integer: '" +
                             text + "'");
  }
  return value;
}

int parse_binary(const std::string& text, const char* column) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw std::runtime_error(std::string(column) + " must be 0 or 1, got '" +
                           text + "'");
}

std::optional<int> parse_optional_int(const std::string& text,
                                      const char* column) {
  if (text.empty()) return std::nullopt;
  return parse_int(text, column);
}

}  // namespace

std::string to_string(Target t) {
  switch (t) {
    case Target::Quasipositivity: return "qp";
    case Target::SliceGenus: return "g4";
    case Target::Tau: return "tau";
  }
  return "qp";
}

Target target_from_string(const std::string& name) {
  if (name == "qp") return Target::Quasipositivity;
  if (name == "g4") return Target::SliceGenus;
  if (name == "tau") return Target::Tau;
  throw std::invalid_argument("unknown target: " + name +
                              " (expected qp, g4, or tau)");
}

std::string expected_csv_header() {
  std::string header = "name,braid";
  for (const char* column : encoding::kFeatureNames) {
    header += ',';
    header += column;
  }
  return header + ",qp,g4,tau";
}

LoadResult load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileNotFound("cannot open knot table: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaMismatch("knot table is empty: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_csv_header()) {
    throw SchemaMismatch("unexpected header; want '" + expected_csv_header() +
                         "', got '" + line + "'");
  }

  LoadResult result;
  std::set<std::string> seen_names;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto fields = split_csv_line(line);
      if (fields.size() != 17) {
        throw std::runtime_error("expected 17 columns, got " +
                                 std::to_string(fields.size()));
      }
      KnotRecord record;
      record.name = fields[0];
      if (record.name.empty()) {
        throw std::runtime_error("knot name is empty");
      }
      if (!seen_names.insert(record.name).second) {
        throw std::runtime_error("duplicate knot name '" + record.name + "'");
      }
      record.word = braid::parse_braid(fields[1]);
      if (record.word.size() >
          static_cast<std::size_t>(braid::kMaxEncodableLength)) {
        throw std::runtime_error("braid word longer than " +
                                 std::to_string(braid::kMaxEncodableLength) +
                                 " letters");
      }
      encoding::FeatureVector& f = record.features;
      f.alternating = parse_binary(fields[2], "alternating");
      f.fibered = parse_binary(fields[3], "fibered");
      f.positive_braid_closure =
          parse_binary(fields[4], "positive_braid_closure");
      f.large = parse_binary(fields[5], "large");
      f.small = parse_binary(fields[6], "small");
      f.crossing_number = parse_int(fields[7], "crossing_number");
      f.seifert_genus = parse_int(fields[8], "seifert_genus");
      f.braid_index = parse_int(fields[9], "braid_index");
      f.signature = parse_int(fields[10], "signature");
      f.arc_index = parse_int(fields[11], "arc_index");
      f.determinant = parse_int(fields[12], "determinant");
      f.rasmussen_s = parse_int(fields[13], "rasmussen_s");

      record.labels.quasipositive = parse_optional_int(fields[14], "qp");
      if (record.labels.quasipositive && *record.labels.quasipositive != 0 &&
          *record.labels.quasipositive != 1) {
        throw std::runtime_error("qp must be 0, 1, or blank");
      }
      record.labels.slice_genus = parse_optional_int(fields[15], "g4");
      if (record.labels.slice_genus && *record.labels.slice_genus < 0) {
        throw std::runtime_error("g4 cannot be negative");
      }
      record.labels.tau = parse_optional_int(fields[16], "tau");
      if (record.labels.slice_genus && record.labels.tau &&
          std::abs(*record.labels.tau) > *record.labels.slice_genus) {
        throw std::runtime_error("|tau| exceeds g4");
      }
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      result.row_errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

void AugmentedDataset::reencode(const encoding::NormalizationStats& new_stats) {
  stats = new_stats;
  for (AugmentedRow& row : rows) {
    row.encoded = encoding::encode_record(row.word, row.features, stats);
  }
}

AugmentedDataset augment(const std::vector<KnotRecord>& records,
                         const AugmentOptions& options, std::uint64_t seed,
                         std::vector<std::string>* warnings) {
  if (options.reps < 1) {
    throw std::invalid_argument("augmentation needs at least one representative");
  }
  AugmentedDataset data;
  data.seed = seed;
  data.reps = options.reps;

  std::vector<encoding::FeatureVector> features;
  features.reserve(records.size());
  for (const KnotRecord& record : records) {
    features.push_back(record.features);
  }
  data.stats = features.empty() ? encoding::identity_stats()
                                : encoding::fit_normalization(features);

  for (const KnotRecord& record : records) {
    const std::uint64_t knot_stream =
        rng::derive_seed(seed, rng::hash64(record.name));
    std::set<std::string> seen;
    seen.insert(braid::format_braid(record.word) + "/" +
                std::to_string(record.word.strands));
    for (int rep = 1; rep <= options.reps; ++rep) {
      AugmentedRow row;
      row.name = record.name;
      row.representative = rep;
      row.features = record.features;
      row.labels = record.labels;
      if (rep == 1) {
        row.word = record.word;
      } else {
        bool distinct = false;
        for (int attempt = 0; attempt <= options.distinct_retries; ++attempt) {
          const std::uint64_t rep_seed = rng::derive_seed(
              knot_stream, (static_cast<std::uint64_t>(rep) << 8) |
                               static_cast<std::uint64_t>(attempt));
          rng::Engine eng(rep_seed);
          const int moves = eng.int_in(options.moves_min, options.moves_max);
          row.word = braid::random_equivalent(record.word, moves, {},
                                              rng::derive_seed(rep_seed, 1));
          const std::string key = braid::format_braid(row.word) + "/" +
                                  std::to_string(row.word.strands);
          if (seen.insert(key).second) {
            distinct = true;
            break;
          }
        }
        if (!distinct && warnings) {
          warnings->push_back("knot " + record.name + " representative " +
                              std::to_string(rep) +
                              " duplicates an earlier word after " +
                              std::to_string(options.distinct_retries) +
                              " retries");
        }
      }
      row.encoded = encoding::encode_record(row.word, row.features, data.stats);
      data.rows.push_back(std::move(row));
    }
  }
  return data;
}

bool has_label(const KnotLabels& labels, Target target) {
  switch (target) {
    case Target::Quasipositivity: return labels.quasipositive.has_value();
    case Target::SliceGenus: return labels.slice_genus.has_value();
    case Target::Tau: return labels.tau.has_value();
  }
  return false;
}

double label_value(const KnotLabels& labels, Target target) {
  switch (target) {
    case Target::Quasipositivity: return *labels.quasipositive;
    case Target::SliceGenus: return *labels.slice_genus;
    case Target::Tau: return *labels.tau;
  }
  return 0.0;
}

Split split_by_knot(const AugmentedDataset& data, Target target,
                    int test_knot_count, std::uint64_t seed) {
  if (test_knot_count < 0) {
    throw std::invalid_argument("test knot count cannot be negative");
  }
  std::vector<std::string> labeled;  // first-appearance order
  std::set<std::string> seen;
  for (const AugmentedRow& row : data.rows) {
    if (has_label(row.labels, target) && seen.insert(row.name).second) {
      labeled.push_back(row.name);
    }
  }
  if (static_cast<std::size_t>(test_knot_count) > labeled.size()) {
    throw InsufficientLabeledKnots(
        "requested " + std::to_string(test_knot_count) +
        " test knots but only " + std::to_string(labeled.size()) +
        " labeled knots exist");
  }
  rng::Engine eng(rng::derive_seed(seed, 0x5711));
  for (std::size_t i = labeled.size(); i > 1; --i) {
    std::swap(labeled[i - 1], labeled[eng.below(i)]);
  }
  const std::set<std::string> test_knots(
      labeled.begin(), labeled.begin() + test_knot_count);
  const std::set<std::string> train_knots(
      labeled.begin() + test_knot_count, labeled.end());

  Split split;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const AugmentedRow& row = data.rows[i];
    if (test_knots.count(row.name) != 0) {
      split.test.push_back(i);
    } else if (train_knots.count(row.name) != 0) {
      split.train.push_back(i);
    }
  }
  return split;
}

MeanPrediction mean_prediction(
    const std::function<double(const AugmentedRow&)>& predict,
    const AugmentedDataset& data, const std::string& knot_name) {
  std::vector<double> values;
  for (const AugmentedRow& row : data.rows) {
    if (row.name == knot_name) {
      values.push_back(predict(row));
    }
  }
  if (values.empty()) {
    throw UnknownKnot("no rows for knot '" + knot_name + "'");
  }
  MeanPrediction out;
  out.representatives = static_cast<int>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

RelationReport relation_check(
    const std::function<double(const AugmentedRow&)>& genus_predict,
    const std::function<double(const AugmentedRow&)>& tau_predict,
    const AugmentedDataset& data) {
  RelationReport report;
  report.rows_checked = data.rows.size();
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const AugmentedRow& row = data.rows[i];
    const double g = genus_predict(row);
    const double t = tau_predict(row);
    const long long g_rounded = nn::round_half_up(g);
    const long long t_rounded = nn::round_half_up(t);
    if (g_rounded < std::llabs(t_rounded)) {
      report.tau_violations.push_back({i, g, t});
    }
    if (2 * g_rounded < std::llabs(row.features.rasmussen_s)) {
      report.s_violations.push_back({i, g, t});
    }
  }
  return report;
}

}  // namespace knotnet::dataset
