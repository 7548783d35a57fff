#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotnet/braid.hpp"

namespace knotnet::quasipos {

struct NonPositiveCenter : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeGenus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A positive band: conjugator * sigma_j * conjugator^-1.
struct Band {
  braid::BraidWord conjugator;
  braid::BraidLetter core;  // sign always +1
};

// A braid word together with the 1-based positions of each band's central
// positive letter. Conjugators are rebuilt from the interleaved non-center
// letters.
struct BandCertificate {
  braid::BraidWord word;
  std::vector<int> centers;  // strictly increasing, 1-based
};

enum class EqualityMethod { FreeReduction, HandleReduction };

struct VerifyResult {
  bool valid = false;
  int band_count = 0;
  int strands = 0;
  std::optional<int> genus;  // present iff valid
  EqualityMethod equality_method = EqualityMethod::FreeReduction;
  std::string note;  // diagnostic for invalid results
};

// Slice genus of the closure of a product of `band_count` positive bands on
// `strands` strands: (m - n + 1) / 2.
int rudolph_genus(int band_count, int strands);

// Expands the certificate: the band for a center at position p is
// u * x_p * u^-1, where u is the freely reduced subword of all non-center
// letters at positions before p. Throws NonPositiveCenter if a center letter
// has sign -1.
std::vector<Band> bands_from_certificate(const BandCertificate& cert);

braid::BraidWord band_word(const Band& band);

// Valid iff all centers are positive, the band product equals the word in
// B_n (free reduction first, handle reduction as fallback), and the closure
// is a knot. Throws braid::BudgetExceeded when the fallback oracle runs out
// of steps (the answer is unknown, not invalid).
VerifyResult verify_certificate(
    const BandCertificate& cert,
    std::uint64_t budget = braid::kDefaultEqualityBudget);

// Verifies the mirrored word with the same center positions. The genus
// reported is g4 of the mirror; tau of the original is its negative.
VerifyResult verify_quasinegative(
    const BandCertificate& cert,
    std::uint64_t budget = braid::kDefaultEqualityBudget);

struct SearchOptions {
  std::uint64_t equality_budget = braid::kDefaultEqualityBudget;
  std::size_t max_subsets = 100'000;  // per-word enumeration cap
  int moves_min = 2;                  // rewrite intensity for stage 2
  int moves_max = 12;
};

// Two-stage certificate search. Stage 1 enumerates all writhe-sized subsets
// of the positive-letter positions, cheapest telescoped product first.
// Stage 2 applies up to rewrite_budget random equivalent rewrites and
// retries stage 1 on each. Absence of a result is not a disproof of
// quasipositivity.
std::optional<BandCertificate> search_certificate(
    const braid::BraidWord& word, int rewrite_budget, std::uint64_t seed,
    const SearchOptions& opts = {});

// One row of the certificate fixture file (tab-separated: knot name, braid
// word, comma-separated centers, expected genus or tau). A row that cannot
// be parsed is kept with `error` set, so one bad row never hides the others.
struct CertificateFixtureRow {
  std::string name;
  BandCertificate cert;
  int expected = 0;
  std::string error;  // empty when the row parsed cleanly
};

std::vector<CertificateFixtureRow> load_certificate_fixture(
    const std::string& path);

}  // namespace knotnet::quasipos
