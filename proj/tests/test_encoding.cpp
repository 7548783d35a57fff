#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "knotnet/encoding.hpp"
#include "knotnet/rng.hpp"
#include "testutil.hpp"

using namespace knotnet;

TEST_CASE("one-hot letter indices") {
  CHECK(encoding::one_hot_index({1, 1}) == 1);
  CHECK(encoding::one_hot_index({6, 1}) == 6);
  CHECK(encoding::one_hot_index({1, -1}) == 7);
  CHECK(encoding::one_hot_index({6, -1}) == 12);
  CHECK(encoding::one_hot_index({3, 1}) == 3);
  CHECK(encoding::one_hot_index({3, -1}) == 9);
  CHECK_THROWS_AS(encoding::one_hot_index({7, 1}), braid::GeneratorOutOfRange);
  CHECK_THROWS_AS(encoding::one_hot_index({0, 1}), braid::GeneratorOutOfRange);

  // index = generator + 3 * (1 - sign) over the whole alphabet
  for (int gen = 1; gen <= 6; ++gen) {
    for (int sign : {1, -1}) {
      CHECK(encoding::one_hot_index({gen, sign}) == gen + 3 * (1 - sign));
    }
  }
}

TEST_CASE("word encoding dimensions and placement") {
  CHECK(encoding::kWordDim == 228);
  CHECK(encoding::kInputDim == 240);

  const auto empty = encoding::encode_word(braid::parse_braid(""));
  CHECK(empty.size() == 228);
  CHECK(std::accumulate(empty.begin(), empty.end(), 0.0) == 0.0);

  const auto one = encoding::encode_word(braid::parse_braid("A"));
  CHECK(one[0] == 1.0);
  CHECK(std::accumulate(one.begin(), one.end(), 0.0) == 1.0);

  // second letter lands in the second 12-wide slot
  const auto two = encoding::encode_word(braid::parse_braid("Ab"));
  CHECK(two[0] == 1.0);
  CHECK(two[12 + 7] == 1.0);  // sigma_2^-1 has letter index 8
  CHECK(std::accumulate(two.begin(), two.end(), 0.0) == 2.0);

  braid::BraidWord full;
  full.strands = 7;
  full.letters.assign(19, {1, 1});
  CHECK(encoding::encode_word(full).size() == 228);
  full.letters.push_back({1, 1});
  CHECK_THROWS_AS(encoding::encode_word(full), encoding::WordTooLong);

  braid::BraidWord bad;
  bad.strands = 7;
  bad.letters.push_back({7, 1});
  CHECK_THROWS_AS(encoding::encode_word(bad), braid::GeneratorOutOfRange);
}

TEST_CASE("decoding inverts encoding") {
  rng::Engine eng(31);
  for (int i = 0; i < 1000; ++i) {
    const braid::BraidWord word = testutil::random_word(eng);
    const braid::BraidWord roundtrip =
        encoding::decode_word(encoding::encode_word(word));
    CHECK(roundtrip == word);
  }
}

TEST_CASE("malformed encodings are rejected") {
  std::vector<double> v(228, 0.0);
  CHECK(encoding::decode_word(v).empty());

  v[0] = 1.0;
  v[5] = 1.0;  // two hot entries in slot one
  CHECK_THROWS_AS(encoding::decode_word(v), encoding::MalformedEncoding);

  std::fill(v.begin(), v.end(), 0.0);
  v[3] = 0.5;  // not a one-hot value
  CHECK_THROWS_AS(encoding::decode_word(v), encoding::MalformedEncoding);

  std::fill(v.begin(), v.end(), 0.0);
  v[12] = 1.0;  // slot two populated while slot one is empty
  CHECK_THROWS_AS(encoding::decode_word(v), encoding::MalformedEncoding);

  CHECK_THROWS_AS(encoding::decode_word(std::vector<double>(100, 0.0)),
                  encoding::MalformedEncoding);
}

TEST_CASE("normalization statistics") {
  encoding::FeatureVector a;
  a.crossing_number = 1;
  a.signature = -2;
  encoding::FeatureVector b;
  b.crossing_number = 3;
  b.signature = -2;
  const std::vector<encoding::FeatureVector> rows = {a, b};

  const auto stats = encoding::fit_normalization(rows);
  CHECK(stats.mean[5] == doctest::Approx(2.0));  // crossing_number column
  CHECK(stats.std[5] == doctest::Approx(1.0));   // population std of {1, 3}
  CHECK(stats.mean[8] == doctest::Approx(-2.0)); // constant signature column
  CHECK(stats.std[8] == doctest::Approx(1.0));   // constant columns fall back

  const auto na = encoding::apply_normalization(a, stats);
  const auto nb = encoding::apply_normalization(b, stats);
  CHECK(na[5] == doctest::Approx(-1.0));
  CHECK(nb[5] == doctest::Approx(1.0));
  CHECK(na[8] == doctest::Approx(0.0));  // constant column normalizes to zero
  CHECK(nb[8] == doctest::Approx(0.0));

  CHECK_THROWS_AS(encoding::fit_normalization({}), encoding::EmptyDataset);
}

TEST_CASE("record encoding stacks word block and features") {
  encoding::FeatureVector f;
  f.alternating = 1;
  f.crossing_number = 11;
  f.rasmussen_s = 4;
  const braid::BraidWord word = braid::parse_braid("AAbAbACBBCC");

  const auto encoded =
      encoding::encode_record(word, f, encoding::identity_stats());
  REQUIRE(encoded.size() == 240);
  const auto word_block = encoding::encode_word(word);
  for (int i = 0; i < encoding::kWordDim; ++i) {
    CHECK(encoded[static_cast<std::size_t>(i)] ==
          word_block[static_cast<std::size_t>(i)]);
  }
  // identity stats pass the raw feature values through
  CHECK(encoded[228] == 1.0);   // alternating
  CHECK(encoded[233] == 11.0);  // crossing_number
  CHECK(encoded[239] == 4.0);   // rasmussen_s

  encoding::NormalizationStats stats = encoding::identity_stats();
  stats.mean[5] = 10.0;
  stats.std[5] = 2.0;
  const auto scaled = encoding::encode_record(word, f, stats);
  CHECK(scaled[233] == doctest::Approx(0.5));
}
