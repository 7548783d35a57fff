#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "knotnet/braid.hpp"
#include "knotnet/quasipos.hpp"
#include "knotnet/rng.hpp"
#include "testutil.hpp"

using namespace knotnet;
using quasipos::BandCertificate;

namespace {

BandCertificate make_cert(const std::string& word, std::vector<int> centers) {
  return {braid::parse_braid(word), std::move(centers)};
}

const std::vector<int> kExampleCenters = {1, 2, 4, 6, 7, 10, 11};
const char* kExampleWord = "AAbAbACBBCC";

}  // namespace

TEST_CASE("genus from band count and strand count") {
  CHECK(quasipos::rudolph_genus(7, 4) == 2);
  CHECK(quasipos::rudolph_genus(4, 5) == 0);
  CHECK(quasipos::rudolph_genus(1, 2) == 0);
  CHECK(quasipos::rudolph_genus(3, 2) == 1);
  CHECK_THROWS_AS(quasipos::rudolph_genus(4, 4), quasipos::ParityError);
  CHECK_THROWS_AS(quasipos::rudolph_genus(1, 4), quasipos::NegativeGenus);
}

TEST_CASE("bands expand with freely reduced conjugators") {
  const auto bands =
      quasipos::bands_from_certificate(make_cert(kExampleWord, kExampleCenters));
  REQUIRE(bands.size() == 7);
  const std::vector<std::string> expected = {"A",     "A", "bAB", "bbABB",
                                             "bbCBB", "C", "C"};
  for (std::size_t i = 0; i < bands.size(); ++i) {
    CHECK(braid::format_braid(quasipos::band_word(bands[i])) == expected[i]);
    CHECK(bands[i].core.sign == 1);
  }
}

TEST_CASE("malformed certificates are reported") {
  CHECK_THROWS_AS(
      quasipos::bands_from_certificate(make_cert(kExampleWord, {3})),
      quasipos::NonPositiveCenter);
  CHECK_THROWS_AS(
      quasipos::bands_from_certificate(make_cert(kExampleWord, {0, 1})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      quasipos::bands_from_certificate(make_cert(kExampleWord, {1, 12})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      quasipos::bands_from_certificate(make_cert(kExampleWord, {2, 2})),
      std::invalid_argument);
  CHECK_THROWS_AS(quasipos::bands_from_certificate(make_cert(kExampleWord, {})),
                  std::invalid_argument);

  // verification never throws on these, it reports an invalid certificate
  CHECK_FALSE(quasipos::verify_certificate(make_cert(kExampleWord, {3})).valid);
  CHECK_FALSE(
      quasipos::verify_certificate(make_cert(kExampleWord, {0, 1})).valid);
  CHECK_FALSE(quasipos::verify_certificate(make_cert(kExampleWord, {})).valid);
}

TEST_CASE("verifying the decomposed example word") {
  const quasipos::VerifyResult result =
      quasipos::verify_certificate(make_cert(kExampleWord, kExampleCenters));
  CHECK(result.valid);
  CHECK(result.band_count == 7);
  CHECK(result.strands == 4);
  REQUIRE(result.genus.has_value());
  CHECK(*result.genus == 2);
  CHECK(result.equality_method == quasipos::EqualityMethod::FreeReduction);
}

TEST_CASE("rejections: wrong band count, wrong product, link closure") {
  // dropping a center leaves the band count short of the writhe
  auto short_cert = make_cert(kExampleWord, {1, 2, 4, 6, 7, 10});
  CHECK_FALSE(quasipos::verify_certificate(short_cert).valid);

  // flipping a core letter makes that center negative
  std::string flipped = kExampleWord;
  flipped[0] = 'a';
  CHECK_FALSE(
      quasipos::verify_certificate(make_cert(flipped, kExampleCenters)).valid);

  // a two-component closure is not a knot even if the product matches
  const auto link = make_cert("AA", {1, 2});
  const quasipos::VerifyResult result = quasipos::verify_certificate(link);
  CHECK_FALSE(result.valid);
  CHECK(result.note.find("knot") != std::string::npos);
}

TEST_CASE("band product equality can need the word-problem oracle") {
  // The word carries a trivial-but-not-freely-trivial block between the
  // first core and the rest, so the telescoped product only matches after
  // handle reduction.
  const auto cert = make_cert("ABCBcbcBC", {1, 8, 9});
  const quasipos::VerifyResult result = quasipos::verify_certificate(cert);
  CHECK(result.valid);
  REQUIRE(result.genus.has_value());
  CHECK(*result.genus == 0);
  CHECK(result.equality_method == quasipos::EqualityMethod::HandleReduction);

  // the oracle honors its budget instead of guessing
  CHECK_THROWS_AS(quasipos::verify_certificate(cert, 0),
                  braid::BudgetExceeded);
}

TEST_CASE("generated certificates verify with the stated genus") {
  rng::Engine eng(21);
  for (int i = 0; i < 50; ++i) {
    const int strands = eng.int_in(2, 5);
    const int genus = eng.int_in(0, 2);
    const auto generated = testutil::random_certificate(eng, strands, genus);
    const quasipos::VerifyResult result =
        quasipos::verify_certificate(generated.cert);
    CHECK(result.valid);
    REQUIRE(result.genus.has_value());
    CHECK(*result.genus == generated.genus);
    // honest constructions collapse under free reduction alone
    CHECK(result.equality_method == quasipos::EqualityMethod::FreeReduction);

    // flipping one core letter must always be caught
    quasipos::BandCertificate corrupted = generated.cert;
    const int center = corrupted.centers[eng.below(corrupted.centers.size())];
    corrupted.word.letters[static_cast<std::size_t>(center - 1)].sign = -1;
    CHECK_FALSE(quasipos::verify_certificate(corrupted).valid);
  }
}

TEST_CASE("quasinegative certificates mirror the word") {
  const braid::BraidWord mirrored =
      braid::mirror(braid::parse_braid(kExampleWord));
  const BandCertificate cert{mirrored, kExampleCenters};
  const quasipos::VerifyResult result = quasipos::verify_quasinegative(cert);
  CHECK(result.valid);
  REQUIRE(result.genus.has_value());
  CHECK(*result.genus == 2);  // tau of the mirrored word is -2

  // the same centers on the unmirrored word point at positive letters,
  // which a quasinegative certificate must reject
  CHECK_FALSE(
      quasipos::verify_quasinegative(make_cert(kExampleWord, kExampleCenters))
          .valid);
}

TEST_CASE("fixture tables verify end to end") {
  const auto qp = quasipos::load_certificate_fixture(
      testutil::data_path("quasipositive_certificates.tsv"));
  REQUIRE(qp.size() == 72);
  CHECK(qp.front().name == "11n_35");
  CHECK(braid::format_braid(qp.front().cert.word) == kExampleWord);
  CHECK(qp.front().cert.centers == kExampleCenters);
  CHECK(qp.front().expected == 2);
  for (const auto& row : qp) {
    CAPTURE(row.name);
    REQUIRE(row.error.empty());
    const auto result = quasipos::verify_certificate(row.cert);
    CHECK(result.valid);
    REQUIRE(result.genus.has_value());
    CHECK(*result.genus == row.expected);
  }

  const auto qn = quasipos::load_certificate_fixture(
      testutil::data_path("quasinegative_certificates.tsv"));
  REQUIRE(qn.size() == 12);
  CHECK(qn.front().name == "11n_1");
  for (const auto& row : qn) {
    CAPTURE(row.name);
    REQUIRE(row.error.empty());
    const auto result = quasipos::verify_quasinegative(row.cert);
    CHECK(result.valid);
    REQUIRE(result.genus.has_value());
    CHECK(-*result.genus == row.expected);
  }
}

TEST_CASE("certificate search") {
  // all positive letters are centers, so the single candidate wins
  const braid::BraidWord example = braid::parse_braid(kExampleWord);
  auto found = quasipos::search_certificate(example, 0, 1);
  REQUIRE(found.has_value());
  CHECK(found->centers == kExampleCenters);

  // conjugating adds a non-center positive letter to choose around
  const braid::BraidWord conjugated = braid::conjugate(example, {1, 1});
  found = quasipos::search_certificate(conjugated, 0, 1);
  REQUIRE(found.has_value());
  CHECK(quasipos::verify_certificate(*found).valid);
  CHECK(*quasipos::verify_certificate(*found).genus == 2);

  // the mirrored trefoil has negative writhe on every equivalent kept in
  // bounds, so the search reports absence quickly
  CHECK_FALSE(
      quasipos::search_certificate(braid::parse_braid("aaa"), 5, 1).has_value());

  CHECK_THROWS_AS(quasipos::search_certificate(braid::parse_braid("AA"), 0, 1),
                  std::invalid_argument);

  // generated certificates are rediscoverable from their bare words
  rng::Engine eng(22);
  for (int i = 0; i < 10; ++i) {
    const auto generated = testutil::random_certificate(eng, 4, 1);
    const auto rediscovered =
        quasipos::search_certificate(generated.cert.word, 0, 1);
    REQUIRE(rediscovered.has_value());
    const auto result = quasipos::verify_certificate(*rediscovered);
    CHECK(result.valid);
    CHECK(*result.genus == generated.genus);
  }
}
