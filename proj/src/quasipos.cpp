#include "knotnet/quasipos.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "knotnet/rng.hpp"

namespace knotnet::quasipos {

namespace {

using braid::BraidLetter;
using braid::BraidWord;

// Returns an error message for a malformed center list, or empty if fine.
// Positivity of the letters is checked separately so callers can distinguish
// "nonsense positions" from "center on a negative letter".
std::string center_position_error(const BandCertificate& cert) {
  const int len = static_cast<int>(cert.word.letters.size());
  int prev = 0;
  for (int c : cert.centers) {
    if (c < 1 || c > len) {
      return "center position " + std::to_string(c) + " outside word of length " +
             std::to_string(len);
    }
    if (c <= prev) {
      return "center positions not strictly increasing at " + std::to_string(c);
    }
    prev = c;
  }
  if (cert.centers.empty() && !cert.word.letters.empty()) {
    return "empty center list for a nonempty word";
  }
  return {};
}

}  // namespace

int rudolph_genus(int band_count, int strands) {
  const int numerator = band_count - strands + 1;
  if (numerator % 2 != 0) {
    throw ParityError("band count " + std::to_string(band_count) + " on " +
                      std::to_string(strands) +
                      " strands gives an odd genus numerator");
  }
  if (numerator < 0) {
    throw NegativeGenus("band count " + std::to_string(band_count) + " on " +
                        std::to_string(strands) +
                        " strands would give negative genus");
  }
  return numerator / 2;
}

std::vector<Band> bands_from_certificate(const BandCertificate& cert) {
  if (const std::string err = center_position_error(cert); !err.empty()) {
    throw std::invalid_argument(err);
  }
  std::vector<bool> is_center(cert.word.letters.size(), false);
  for (int c : cert.centers) is_center[static_cast<std::size_t>(c - 1)] = true;

  std::vector<Band> bands;
  bands.reserve(cert.centers.size());
  BraidWord accumulated;  // non-center letters seen so far, in order
  accumulated.strands = cert.word.strands;
  for (std::size_t i = 0; i < cert.word.letters.size(); ++i) {
    const BraidLetter letter = cert.word.letters[i];
    if (!is_center[i]) {
      accumulated.letters.push_back(letter);
      continue;
    }
    if (letter.sign != 1) {
      throw NonPositiveCenter("center at position " + std::to_string(i + 1) +
                              " sits on a negative letter");
    }
    bands.push_back(Band{braid::free_reduce(accumulated), letter});
  }
  return bands;
}

braid::BraidWord band_word(const Band& band) {
  BraidWord core;
  core.strands = band.conjugator.strands;
  core.letters.push_back(band.core);
  return braid::concat(braid::concat(band.conjugator, core),
                       braid::inverse(band.conjugator));
}

VerifyResult verify_certificate(const BandCertificate& cert,
                                std::uint64_t budget) {
  VerifyResult result;
  result.band_count = static_cast<int>(cert.centers.size());
  result.strands = cert.word.strands;

  if (const std::string err = center_position_error(cert); !err.empty()) {
    result.note = err;
    return result;
  }
  for (int c : cert.centers) {
    if (cert.word.letters[static_cast<std::size_t>(c - 1)].sign != 1) {
      result.note =
          "center at position " + std::to_string(c) + " is a negative letter";
      return result;
    }
  }

  // The product of m positive bands has writhe m, so a mismatch already
  // rules the certificate out without touching the word problem.
  if (braid::writhe(cert.word) != result.band_count) {
    result.note = "band count " + std::to_string(result.band_count) +
                  " does not match writhe " +
                  std::to_string(braid::writhe(cert.word));
    return result;
  }

  BraidWord product;
  product.strands = cert.word.strands;
  for (const Band& band : bands_from_certificate(cert)) {
    product = braid::concat(product, band_word(band));
  }

  bool product_matches = false;
  const BraidWord product_reduced = braid::free_reduce(product);
  if (product_reduced.letters == braid::free_reduce(cert.word).letters) {
    product_matches = true;
    result.equality_method = EqualityMethod::FreeReduction;
  } else if (braid::words_equal(product, cert.word, budget)) {
    product_matches = true;
    result.equality_method = EqualityMethod::HandleReduction;
  }
  if (!product_matches) {
    result.note = "band product is not equal to the word";
    return result;
  }

  if (!braid::is_knot_closure(cert.word)) {
    result.note = "closure is a link, not a knot";
    return result;
  }

  result.valid = true;
  result.genus = rudolph_genus(result.band_count, result.strands);
  return result;
}

VerifyResult verify_quasinegative(const BandCertificate& cert,
                                  std::uint64_t budget) {
  BandCertificate mirrored{braid::mirror(cert.word), cert.centers};
  return verify_certificate(mirrored, budget);
}

namespace {

// Freely reduced length of the telescoped band product for one choice of
// centers. The product collapses to (prefix through the last center) times
// the inverse of the non-center letters before it, so we never have to
// expand every conjugator.
BraidWord telescoped_product(const BraidWord& word,
                             const std::vector<int>& centers) {
  const int last = centers.back();
  BraidWord prefix;
  prefix.strands = word.strands;
  prefix.letters.assign(word.letters.begin(), word.letters.begin() + last);

  std::vector<bool> is_center(word.letters.size(), false);
  for (int c : centers) is_center[static_cast<std::size_t>(c - 1)] = true;
  BraidWord skipped;
  skipped.strands = word.strands;
  for (int i = 0; i < last; ++i) {
    if (!is_center[static_cast<std::size_t>(i)]) {
      skipped.letters.push_back(word.letters[static_cast<std::size_t>(i)]);
    }
  }
  return braid::free_reduce(braid::concat(prefix, braid::inverse(skipped)));
}

struct Candidate {
  std::vector<int> centers;
  std::size_t cost;  // reduced telescoped length; smaller verifies first
};

// Enumerates subsets of the positive-letter positions of size equal to the
// writhe, scores each by telescoped length, and verifies cheapest-first.
std::optional<BandCertificate> stage_one(const BraidWord& word,
                                         const SearchOptions& opts) {
  const int w = braid::writhe(word);
  const int n = word.strands;
  if (w < n - 1 || (w - n + 1) % 2 != 0) return std::nullopt;

  std::vector<int> positive_positions;
  for (std::size_t i = 0; i < word.letters.size(); ++i) {
    if (word.letters[i].sign == 1) {
      positive_positions.push_back(static_cast<int>(i + 1));
    }
  }
  const int pool = static_cast<int>(positive_positions.size());
  if (w <= 0 || w > pool) return std::nullopt;

  std::vector<Candidate> candidates;
  std::vector<int> pick(static_cast<std::size_t>(w));
  std::iota(pick.begin(), pick.end(), 0);  // indices into positive_positions
  bool more = true;
  while (more && candidates.size() < opts.max_subsets) {
    std::vector<int> centers(pick.size());
    for (std::size_t i = 0; i < pick.size(); ++i) {
      centers[i] = positive_positions[static_cast<std::size_t>(pick[i])];
    }
    const std::size_t cost = telescoped_product(word, centers).letters.size();
    candidates.push_back({std::move(centers), cost});
    // next combination in lexicographic order
    more = false;
    for (int i = w - 1; i >= 0; --i) {
      if (pick[static_cast<std::size_t>(i)] < pool - w + i) {
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < w; ++j) {
          pick[static_cast<std::size_t>(j)] =
              pick[static_cast<std::size_t>(j - 1)] + 1;
        }
        more = true;
        break;
      }
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.cost < b.cost;
                   });

  for (const Candidate& candidate : candidates) {
    BandCertificate cert{word, candidate.centers};
    try {
      if (verify_certificate(cert, opts.equality_budget).valid) {
        return cert;
      }
    } catch (const braid::BudgetExceeded&) {
      // unknown, keep looking
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<BandCertificate> search_certificate(const braid::BraidWord& word,
                                                  int rewrite_budget,
                                                  std::uint64_t seed,
                                                  const SearchOptions& opts) {
  if (!braid::is_knot_closure(word)) {
    throw std::invalid_argument("certificate search requires a knot closure");
  }
  if (auto found = stage_one(word, opts)) return found;

  std::set<std::string> tried;
  tried.insert(braid::format_braid(word));
  for (int attempt = 1; attempt <= rewrite_budget; ++attempt) {
    rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const int moves = eng.int_in(opts.moves_min, opts.moves_max);
    BraidWord rewritten = braid::random_equivalent(
        word, moves, {},
        rng::derive_seed(seed, 0x100000ull + static_cast<std::uint64_t>(attempt)));
    if (!tried.insert(braid::format_braid(rewritten) + "|" +
                      std::to_string(rewritten.strands))
             .second) {
      continue;
    }
    if (auto found = stage_one(rewritten, opts)) return found;
  }
  return std::nullopt;
}

std::vector<CertificateFixtureRow> load_certificate_fixture(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open certificate fixture: " + path);
  }
  std::vector<CertificateFixtureRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    CertificateFixtureRow row;
    if (!fields.empty()) row.name = fields[0];
    try {
      if (fields.size() != 4) {
        throw std::runtime_error("expected 4 tab-separated fields, got " +
                                 std::to_string(fields.size()));
      }
      row.cert.word = braid::parse_braid(fields[1]);
      std::stringstream centers(fields[2]);
      std::string token;
      while (std::getline(centers, token, ',')) {
        std::size_t used = 0;
        row.cert.centers.push_back(std::stoi(token, &used));
        if (used != token.size()) {
          throw std::runtime_error("malformed center '" + token + "'");
        }
      }
      row.expected = std::stoi(fields[3]);
    } catch (const std::exception& e) {
      row.error = "line " + std::to_string(line_no) + ": " + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace knotnet::quasipos
