#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace knotnet::braid {

// Universe of encodable words: Artin generators sigma_1..sigma_6, so at most
// 7 strands, and at most 19 letters. Intermediate rewriting may exceed the
// length bound but never the generator bound.
inline constexpr int kMaxGenerator = 6;
inline constexpr int kMaxStrands = kMaxGenerator + 1;
inline constexpr int kMaxEncodableLength = 19;

inline constexpr std::uint64_t kDefaultEqualityBudget = 1'000'000;

struct InvalidCharacter : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeneratorOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StrandLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotDestabilizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PatternMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The word-problem oracle ran out of rewrite steps: the answer is unknown,
// never wrong.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One letter sigma_g^{sign}, generator in 1..6, sign in {+1,-1}.
struct BraidLetter {
  int generator = 1;
  int sign = +1;

  bool operator==(const BraidLetter&) const = default;
};

BraidLetter make_letter(int generator, int sign);

inline BraidLetter inverse(BraidLetter l) { return {l.generator, -l.sign}; }

struct BraidWord {
  std::vector<BraidLetter> letters;
  int strands = 2;

  bool operator==(const BraidWord&) const = default;
  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
};

// Checks strands in 2..7 and every generator in 1..strands-1.
void validate(const BraidWord& word);

// Strand permutation of the braid closure, images[i] = image of strand i+1
// (values 1..n).
struct Permutation {
  std::vector<int> images;

  bool operator==(const Permutation&) const = default;
  int degree() const { return static_cast<int>(images.size()); }
  bool is_identity() const;
  // true iff the permutation is a single cycle through all n strands
  bool is_full_cycle() const;
  std::vector<int> cycle_type() const;  // sorted cycle lengths
};

// Text format of the fixture tables: A..F = sigma_1..sigma_6, a..f inverses.
BraidWord parse_braid(const std::string& text);
std::string format_braid(const BraidWord& word);

int writhe(const BraidWord& word);
BraidWord mirror(const BraidWord& word);

// Unique freely reduced form: all adjacent sigma^e sigma^-e pairs removed.
BraidWord free_reduce(const BraidWord& word);

Permutation permutation(const BraidWord& word);
bool is_knot_closure(const BraidWord& word);

BraidWord inverse(const BraidWord& word);
BraidWord concat(const BraidWord& a, const BraidWord& b);

// c * word * c^-1 (unreduced)
BraidWord conjugate(const BraidWord& word, BraidLetter c);

// Markov stabilization: append sigma_n^sign, strands n+1.
BraidWord stabilize(const BraidWord& word, int sign,
                    int max_strands = kMaxStrands);
// Inverse move: requires exactly one occurrence of sigma_{n-1}^{±1}; the word
// is cyclically rotated (a conjugation) to expose it at the end first.
BraidWord destabilize(const BraidWord& word);

// word[position:] + word[:position]; conjugation by the removed prefix.
BraidWord rotate(const BraidWord& word, std::size_t position);

enum class RelationMove { Commute, BraidRelation };

// Local rewriting by a group relation at `position` (0-based index of the
// pattern's first letter). Commute swaps sigma_i sigma_j with |i-j| >= 2;
// BraidRelation rewrites sigma_g^a sigma_h^b sigma_g^c -> sigma_h^c sigma_g^b
// sigma_h^a for |g-h| = 1 when the middle sign matches an outer sign.
BraidWord apply_relation_move(const BraidWord& word, std::size_t position,
                              RelationMove kind);

// Positions where each relation move applies.
std::vector<std::size_t> commute_positions(const BraidWord& word);
std::vector<std::size_t> braid_relation_positions(const BraidWord& word);

enum class MoveKind {
  Conjugate,
  StabilizePos,
  StabilizeNeg,
  Destabilize,
  Commute,
  BraidRelation,
  FreeInsert,
  FreeReduce,
  CyclicRotate,
};

// Replayable effect of one applied move.
struct MoveRecord {
  MoveKind kind;
  int writhe_delta = 0;
  int strand_delta = 0;
};

struct EquivalentOptions {
  int max_length = kMaxEncodableLength;
  int max_strands = kMaxStrands;
};

// Applies move_count random Markov/relation moves, skipping any whose result
// would exceed the length or strand bounds. The result is a braid word whose
// closure is the same knot. Deterministic per seed.
BraidWord random_equivalent(const BraidWord& word, int move_count,
                            const EquivalentOptions& opts, std::uint64_t seed,
                            std::vector<MoveRecord>* log = nullptr);

// Dehornoy handle reduction until no handle remains. Throws BudgetExceeded
// after `budget` handle reductions. The result is empty iff the input is
// trivial in B_n.
BraidWord handle_reduce(const BraidWord& word,
                        std::uint64_t budget = kDefaultEqualityBudget);

// Word-problem oracle: true iff w1 = w2 in B_n. Both words must have the same
// strand count (pad by inclusion B_n in B_m first). Permutation inequality is
// used as a fast negative before handle-reducing w1 * w2^-1.
bool words_equal(const BraidWord& w1, const BraidWord& w2,
                 std::uint64_t budget = kDefaultEqualityBudget);

}  // namespace knotnet::braid
