#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "knotnet/braid.hpp"
#include "knotnet/dataset.hpp"
#include "knotnet/encoding.hpp"
#include "testutil.hpp"

using namespace knotnet;

namespace {

// one CSV row with fixed filler features
std::string csv_row(const std::string& name, const std::string& word,
                    const std::string& qp, const std::string& g4,
                    const std::string& tau) {
  return name + "," + word + ",0,1,0,1,0,10,1,2,-2,12,5,2," + qp + "," + g4 +
         "," + tau;
}

}  // namespace

TEST_CASE("target names round trip") {
  using dataset::Target;
  CHECK(dataset::to_string(Target::Quasipositivity) == "qp");
  CHECK(dataset::to_string(Target::SliceGenus) == "g4");
  CHECK(dataset::to_string(Target::Tau) == "tau");
  CHECK(dataset::target_from_string("qp") == Target::Quasipositivity);
  CHECK(dataset::target_from_string("g4") == Target::SliceGenus);
  CHECK(dataset::target_from_string("tau") == Target::Tau);
  CHECK_THROWS_AS(dataset::target_from_string("genus"), std::invalid_argument);
}

TEST_CASE("csv header is fixed") {
  CHECK(dataset::expected_csv_header() ==
        "name,braid,alternating,fibered,positive_braid_closure,large,small,"
        "crossing_number,seifert_genus,braid_index,signature,arc_index,"
        "determinant,rasmussen_s,qp,g4,tau");
}

TEST_CASE("loading a well-formed table") {
  const std::string path = "tmp_dataset_happy.csv";
  testutil::write_file(path, dataset::expected_csv_header() + "\n" +
                                 csv_row("k1", "AAB", "1", "1", "1") + "\n" +
                                 csv_row("k2", "aB", "", "", "-0") + "\n");
  const auto result = dataset::load_csv(path);
  CHECK(result.row_errors.empty());
  REQUIRE(result.records.size() == 2);

  const auto& first = result.records[0];
  CHECK(first.name == "k1");
  CHECK(braid::format_braid(first.word) == "AAB");
  CHECK(first.word.strands == 3);
  CHECK(first.features.alternating == 0);
  CHECK(first.features.fibered == 1);
  CHECK(first.features.crossing_number == 10);
  CHECK(first.features.signature == -2);
  CHECK(first.features.rasmussen_s == 2);
  CHECK(first.labels.quasipositive == 1);
  CHECK(first.labels.slice_genus == 1);
  CHECK(first.labels.tau == 1);

  const auto& second = result.records[1];
  CHECK_FALSE(second.labels.quasipositive.has_value());
  CHECK_FALSE(second.labels.slice_genus.has_value());
  CHECK(second.labels.tau == 0);
}

TEST_CASE("malformed rows are reported individually and skipped") {
  const std::string path = "tmp_dataset_bad_rows.csv";
  std::string text = dataset::expected_csv_header() + "\n";
  text += csv_row("good1", "AB", "1", "0", "0") + "\n";              // line 2
  text += csv_row("badchar", "AxB", "1", "0", "0") + "\n";           // line 3
  text += "short,AB,0,1,0,1,0,10,1,2,-2,12,5,2,1,0\n";               // line 4
  text += csv_row("toolong", std::string(20, 'A'), "1", "9", "9") + "\n";
  text += csv_row("badqp", "AB", "2", "0", "0") + "\n";              // line 6
  text += csv_row("badtau", "AB", "1", "0", "1") + "\n";             // line 7
  text += csv_row("good1", "AB", "1", "0", "0") + "\n";              // line 8
  text += csv_row("badg4", "AB", "1", "-1", "0") + "\n";             // line 9
  text += "badflag,AB,2,1,0,1,0,10,1,2,-2,12,5,2,1,0,0\n";           // line 10
  text += csv_row("good2", "ab", "0", "", "") + "\n";                // line 11
  testutil::write_file(path, text);

  const auto result = dataset::load_csv(path);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].name == "good1");
  CHECK(result.records[1].name == "good2");

  REQUIRE(result.row_errors.size() == 8);
  const std::vector<std::size_t> lines = {3, 4, 5, 6, 7, 8, 9, 10};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(result.row_errors[i].line == lines[i]);
    CHECK_FALSE(result.row_errors[i].message.empty());
  }
  CHECK(result.row_errors[1].message.find("17 columns") != std::string::npos);
  CHECK(result.row_errors[5].message.find("duplicate") != std::string::npos);
}

TEST_CASE("missing files and wrong headers abort the load") {
  CHECK_THROWS_AS(dataset::load_csv("no_such_file.csv"), dataset::FileNotFound);

  const std::string path = "tmp_dataset_header.csv";
  testutil::write_file(path, "name,braid,qp\nk,AB,1\n");
  CHECK_THROWS_AS(dataset::load_csv(path), dataset::SchemaMismatch);
  testutil::write_file(path, "");
  CHECK_THROWS_AS(dataset::load_csv(path), dataset::SchemaMismatch);
}

TEST_CASE("the generated demo table loads cleanly") {
  const std::string path =
      testutil::write_demo_csv("tmp_dataset_demo.csv", true);
  const auto result = dataset::load_csv(path);
  CHECK(result.row_errors.empty());
  CHECK(result.records.size() >= 80);
  for (const auto& record : result.records) {
    CHECK(dataset::has_label(record.labels, dataset::Target::Quasipositivity));
    CHECK(dataset::has_label(record.labels, dataset::Target::SliceGenus));
    CHECK(dataset::has_label(record.labels, dataset::Target::Tau));
  }
}

TEST_CASE("augmentation expands each knot deterministically") {
  testutil::write_demo_csv("tmp_dataset_aug.csv", false, 6);
  auto records = dataset::load_csv("tmp_dataset_aug.csv").records;
  REQUIRE(records.size() == 6);

  dataset::AugmentOptions options;
  options.reps = 8;
  const auto data = dataset::augment(records, options, 11);
  CHECK(data.rows.size() == records.size() * 8);
  CHECK(data.reps == 8);
  CHECK(data.seed == 11);

  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& record = records[k];
    std::set<std::string> words;
    for (int rep = 1; rep <= 8; ++rep) {
      const auto& row = data.rows[k * 8 + static_cast<std::size_t>(rep - 1)];
      CHECK(row.name == record.name);
      CHECK(row.representative == rep);
      CHECK(row.labels == record.labels);
      CHECK(row.features == record.features);
      CHECK(row.encoded.size() == encoding::kInputDim);
      CHECK(braid::is_knot_closure(row.word));
      CHECK(row.word.size() <= braid::kMaxEncodableLength);
      CHECK(row.word.strands <= braid::kMaxStrands);
      words.insert(braid::format_braid(row.word) + "/" +
                   std::to_string(row.word.strands));
    }
    CHECK(data.rows[k * 8].word == record.word);  // representative 1 is as-is
    CHECK(words.size() == 8);                     // all distinct here
  }

  // same seed, same rows; row order of the input does not matter
  const auto replay = dataset::augment(records, options, 11);
  REQUIRE(replay.rows.size() == data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    CHECK(replay.rows[i].word == data.rows[i].word);
    CHECK(replay.rows[i].encoded == data.rows[i].encoded);
  }
  auto reversed = records;
  std::reverse(reversed.begin(), reversed.end());
  const auto flipped = dataset::augment(reversed, options, 11);
  for (const auto& row : data.rows) {
    const auto match = std::find_if(
        flipped.rows.begin(), flipped.rows.end(), [&](const auto& other) {
          return other.name == row.name &&
                 other.representative == row.representative;
        });
    REQUIRE(match != flipped.rows.end());
    CHECK(match->word == row.word);
  }

  // a different seed rewrites differently somewhere
  const auto shifted = dataset::augment(records, options, 12);
  bool any_difference = false;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    if (!(shifted.rows[i].word == data.rows[i].word)) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("exhausted rewrites are kept but reported") {
  testutil::write_demo_csv("tmp_dataset_warn.csv", false, 2);
  auto records = dataset::load_csv("tmp_dataset_warn.csv").records;
  dataset::AugmentOptions options;
  options.reps = 3;
  options.moves_min = 0;
  options.moves_max = 0;  // zero moves can never produce a new word
  std::vector<std::string> warnings;
  const auto data = dataset::augment(records, options, 5, &warnings);
  CHECK(data.rows.size() == records.size() * 3);
  CHECK(warnings.size() == records.size() * 2);  // reps 2 and 3 per knot
  for (const auto& row : data.rows) {
    CHECK(row.word == records[row.name == records[0].name ? 0 : 1].word);
  }
  for (const auto& warning : warnings) {
    CHECK(warning.find("duplicates") != std::string::npos);
  }

  CHECK_THROWS_AS(dataset::augment(records, {0, 0, 0, 0}, 5),
                  std::invalid_argument);
}

TEST_CASE("re-encoding against new statistics") {
  testutil::write_demo_csv("tmp_dataset_reencode.csv", false, 3);
  auto records = dataset::load_csv("tmp_dataset_reencode.csv").records;
  dataset::AugmentOptions options;
  options.reps = 2;
  auto data = dataset::augment(records, options, 3);
  data.reencode(encoding::identity_stats());
  for (const auto& row : data.rows) {
    // identity statistics leave the raw feature values in place
    CHECK(row.encoded[encoding::kWordDim] == row.features.alternating);
    CHECK(row.encoded[encoding::kWordDim + 5] == row.features.crossing_number);
  }
}

TEST_CASE("splits separate knots, not rows") {
  testutil::write_demo_csv("tmp_dataset_split.csv", true);
  auto records = dataset::load_csv("tmp_dataset_split.csv").records;
  dataset::AugmentOptions options;
  options.reps = 2;
  const auto data = dataset::augment(records, options, 21);

  const auto split =
      dataset::split_by_knot(data, dataset::Target::SliceGenus, 10, 77);
  CHECK(split.test.size() == 10 * 2);
  CHECK(split.train.size() == data.rows.size() - split.test.size());
  std::set<std::string> test_names, train_names;
  for (std::size_t i : split.test) test_names.insert(data.rows[i].name);
  for (std::size_t i : split.train) train_names.insert(data.rows[i].name);
  CHECK(test_names.size() == 10);
  for (const auto& name : test_names) {
    CHECK(train_names.count(name) == 0);
  }

  const auto again =
      dataset::split_by_knot(data, dataset::Target::SliceGenus, 10, 77);
  CHECK(again.test == split.test);
  CHECK(again.train == split.train);
  const auto other =
      dataset::split_by_knot(data, dataset::Target::SliceGenus, 10, 78);
  CHECK_FALSE(other.test == split.test);

  CHECK_THROWS_AS(dataset::split_by_knot(data, dataset::Target::SliceGenus,
                                         static_cast<int>(records.size()) + 1,
                                         1),
                  dataset::InsufficientLabeledKnots);
  CHECK_THROWS_AS(
      dataset::split_by_knot(data, dataset::Target::SliceGenus, -1, 1),
      std::invalid_argument);
}

TEST_CASE("unlabeled knots are excluded from both split sides") {
  const std::string path = "tmp_dataset_unlabeled.csv";
  testutil::write_file(path, dataset::expected_csv_header() + "\n" +
                                 csv_row("k1", "AAB", "1", "1", "1") + "\n" +
                                 csv_row("k2", "ab", "0", "", "") + "\n" +
                                 csv_row("k3", "AAAB", "1", "1", "1") + "\n");
  auto records = dataset::load_csv(path).records;
  REQUIRE(records.size() == 3);
  dataset::AugmentOptions options;
  options.reps = 2;
  const auto data = dataset::augment(records, options, 9);

  const auto split =
      dataset::split_by_knot(data, dataset::Target::SliceGenus, 1, 4);
  CHECK(split.test.size() == 2);
  CHECK(split.train.size() == 2);  // k2 has no g4 label, so 2 of 6 rows drop
  for (std::size_t i : split.test) CHECK(data.rows[i].name != "k2");
  for (std::size_t i : split.train) CHECK(data.rows[i].name != "k2");
}

TEST_CASE("per-knot aggregation over representatives") {
  testutil::write_demo_csv("tmp_dataset_mean.csv", false, 2);
  auto records = dataset::load_csv("tmp_dataset_mean.csv").records;
  dataset::AugmentOptions options;
  options.reps = 32;
  const auto data = dataset::augment(records, options, 13);

  const auto agg = dataset::mean_prediction(
      [](const dataset::AugmentedRow& row) {
        return static_cast<double>(row.representative);
      },
      data, records[0].name);
  CHECK(agg.representatives == 32);
  CHECK(agg.mean == doctest::Approx(16.5));
  CHECK(agg.stddev == doctest::Approx(std::sqrt(1023.0 / 12.0)));

  CHECK_THROWS_AS(dataset::mean_prediction(
                      [](const dataset::AugmentedRow&) { return 0.0; }, data,
                      "no_such_knot"),
                  dataset::UnknownKnot);
}

TEST_CASE("relation audit flags impossible invariant pairs") {
  dataset::AugmentedDataset data;
  const std::vector<int> s_values = {0, 2, -4, -4, 2};
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    dataset::AugmentedRow row;
    row.name = "r" + std::to_string(i);
    row.representative = static_cast<int>(i);  // used as a lookup key below
    row.features.rasmussen_s = s_values[i];
    data.rows.push_back(row);
  }
  const std::vector<double> genus = {1.0, 0.0, 2.0, 0.4, 1.0};
  const std::vector<double> tau = {2.0, -1.0, 1.0, 0.0, -3.0};
  const auto report = dataset::relation_check(
      [&](const dataset::AugmentedRow& row) {
        return genus[static_cast<std::size_t>(row.representative)];
      },
      [&](const dataset::AugmentedRow& row) {
        return tau[static_cast<std::size_t>(row.representative)];
      },
      data);

  CHECK(report.rows_checked == 5);
  REQUIRE(report.tau_violations.size() == 3);
  CHECK(report.tau_violations[0].row == 0);  // g=1 cannot carry tau=2
  CHECK(report.tau_violations[1].row == 1);
  CHECK(report.tau_violations[2].row == 4);
  CHECK(report.tau_violations[0].genus_prediction == doctest::Approx(1.0));
  CHECK(report.tau_violations[0].tau_prediction == doctest::Approx(2.0));
  REQUIRE(report.s_violations.size() == 2);
  CHECK(report.s_violations[0].row == 1);  // g=0 against s=2
  CHECK(report.s_violations[1].row == 3);  // g rounds to 0 against s=-4
}
