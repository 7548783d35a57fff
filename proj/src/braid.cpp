#include "knotnet/braid.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <utility>

#include "knotnet/rng.hpp"

namespace knotnet::braid {

BraidLetter make_letter(int generator, int sign) {
  if (generator < 1 || generator > kMaxGenerator) {
    throw GeneratorOutOfRange("generator " + std::to_string(generator) +
                              " outside 1.." + std::to_string(kMaxGenerator));
  }
  if (sign != 1 && sign != -1) {
    throw GeneratorOutOfRange("sign must be +1 or -1");
  }
  return {generator, sign};
}

void validate(const BraidWord& word) {
  if (word.strands < 2 || word.strands > kMaxStrands) {
    throw StrandLimitExceeded("strand count " + std::to_string(word.strands) +
                              " outside 2.." + std::to_string(kMaxStrands));
  }
  for (const BraidLetter& l : word.letters) {
    if (l.generator < 1 || l.generator > word.strands - 1) {
      throw GeneratorOutOfRange("letter sigma_" + std::to_string(l.generator) +
                                " invalid on " + std::to_string(word.strands) +
                                " strands");
    }
    if (l.sign != 1 && l.sign != -1) {
      throw GeneratorOutOfRange("sign must be +1 or -1");
    }
  }
}

bool Permutation::is_identity() const {
  for (int i = 0; i < degree(); ++i) {
    if (images[static_cast<std::size_t>(i)] != i + 1) return false;
  }
  return true;
}

std::vector<int> Permutation::cycle_type() const {
  const int n = degree();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> lengths;
  for (int i = 1; i <= n; ++i) {
    if (seen[static_cast<std::size_t>(i - 1)]) continue;
    int len = 0;
    int j = i;
    while (!seen[static_cast<std::size_t>(j - 1)]) {
      seen[static_cast<std::size_t>(j - 1)] = true;
      j = images[static_cast<std::size_t>(j - 1)];
      ++len;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

bool Permutation::is_full_cycle() const {
  const auto type = cycle_type();
  return type.size() == 1 && type.front() == degree();
}

BraidWord parse_braid(const std::string& text) {
  BraidWord word;
  word.letters.reserve(text.size());
  int max_gen = 1;
  for (char c : text) {
    int gen;
    int sign;
    if (c >= 'A' && c <= 'F') {
      gen = c - 'A' + 1;
      sign = +1;
    } else if (c >= 'a' && c <= 'f') {
      gen = c - 'a' + 1;
      sign = -1;
    } else {
      throw InvalidCharacter(std::string("invalid braid letter '") + c + "'");
    }
    word.letters.push_back({gen, sign});
    max_gen = std::max(max_gen, gen);
  }
  word.strands = std::max(2, max_gen + 1);
  return word;
}

std::string format_braid(const BraidWord& word) {
  std::string out;
  out.reserve(word.size());
  for (const BraidLetter& l : word.letters) {
    const char base = l.sign > 0 ? 'A' : 'a';
    out.push_back(static_cast<char>(base + l.generator - 1));
  }
  return out;
}

int writhe(const BraidWord& word) {
  int w = 0;
  for (const BraidLetter& l : word.letters) w += l.sign;
  return w;
}

BraidWord mirror(const BraidWord& word) {
  BraidWord out = word;
  for (BraidLetter& l : out.letters) l.sign = -l.sign;
  return out;
}

BraidWord free_reduce(const BraidWord& word) {
  BraidWord out;
  out.strands = word.strands;
  out.letters.reserve(word.size());
  for (const BraidLetter& l : word.letters) {
    if (!out.letters.empty() && out.letters.back().generator == l.generator &&
        out.letters.back().sign == -l.sign) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

Permutation permutation(const BraidWord& word) {
  Permutation p;
  p.images.resize(static_cast<std::size_t>(word.strands));
  std::iota(p.images.begin(), p.images.end(), 1);
  for (const BraidLetter& l : word.letters) {
    const int j = l.generator;
    for (int& image : p.images) {
      if (image == j) {
        image = j + 1;
      } else if (image == j + 1) {
        image = j;
      }
    }
  }
  return p;
}

bool is_knot_closure(const BraidWord& word) {
  return permutation(word).is_full_cycle();
}

BraidWord inverse(const BraidWord& word) {
  BraidWord out;
  out.strands = word.strands;
  out.letters.reserve(word.size());
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    out.letters.push_back(inverse(*it));
  }
  return out;
}

BraidWord concat(const BraidWord& a, const BraidWord& b) {
  BraidWord out;
  out.strands = std::max(a.strands, b.strands);
  out.letters.reserve(a.size() + b.size());
  out.letters.insert(out.letters.end(), a.letters.begin(), a.letters.end());
  out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
  return out;
}

BraidWord conjugate(const BraidWord& word, BraidLetter c) {
  if (c.generator < 1 || c.generator > word.strands - 1) {
    throw GeneratorOutOfRange("conjugating letter sigma_" +
                              std::to_string(c.generator) + " invalid on " +
                              std::to_string(word.strands) + " strands");
  }
  BraidWord out;
  out.strands = word.strands;
  out.letters.reserve(word.size() + 2);
  out.letters.push_back(c);
  out.letters.insert(out.letters.end(), word.letters.begin(),
                     word.letters.end());
  out.letters.push_back(inverse(c));
  return out;
}

BraidWord stabilize(const BraidWord& word, int sign, int max_strands) {
  if (word.strands + 1 > std::min(max_strands, kMaxStrands)) {
    throw StrandLimitExceeded("stabilization beyond " +
                              std::to_string(max_strands) + " strands");
  }
  BraidWord out = word;
  out.letters.push_back({word.strands, sign});
  out.strands = word.strands + 1;
  return out;
}

BraidWord destabilize(const BraidWord& word) {
  const int g = word.strands - 1;
  std::size_t count = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word.letters[i].generator == g) {
      ++count;
      at = i;
    }
  }
  if (word.strands <= 2 || count != 1) {
    throw NotDestabilizable("word has " + std::to_string(count) +
                            " occurrences of sigma_" + std::to_string(g));
  }
  BraidWord rotated = rotate(word, (at + 1) % std::max<std::size_t>(word.size(), 1));
  rotated.letters.pop_back();
  rotated.strands = word.strands - 1;
  return rotated;
}

BraidWord rotate(const BraidWord& word, std::size_t position) {
  if (word.empty()) return word;
  BraidWord out;
  out.strands = word.strands;
  out.letters.reserve(word.size());
  const std::size_t n = word.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.letters.push_back(word.letters[(position + i) % n]);
  }
  return out;
}

BraidWord apply_relation_move(const BraidWord& word, std::size_t position,
                              RelationMove kind) {
  BraidWord out = word;
  if (kind == RelationMove::Commute) {
    if (position + 2 > word.size()) {
      throw PatternMismatch("commute position out of range");
    }
    const BraidLetter x = word.letters[position];
    const BraidLetter y = word.letters[position + 1];
    if (std::abs(x.generator - y.generator) < 2) {
      throw PatternMismatch("generators not far commuting");
    }
    out.letters[position] = y;
    out.letters[position + 1] = x;
    return out;
  }
  if (position + 3 > word.size()) {
    throw PatternMismatch("braid relation position out of range");
  }
  const BraidLetter x = word.letters[position];
  const BraidLetter y = word.letters[position + 1];
  const BraidLetter z = word.letters[position + 2];
  if (x.generator != z.generator ||
      std::abs(x.generator - y.generator) != 1) {
    throw PatternMismatch("no sigma_g sigma_h sigma_g pattern with |g-h|=1");
  }
  if (y.sign != x.sign && y.sign != z.sign) {
    throw PatternMismatch("middle sign matches neither outer sign");
  }
  // sigma_g^a sigma_h^b sigma_g^c = sigma_h^c sigma_g^b sigma_h^a
  out.letters[position] = {y.generator, z.sign};
  out.letters[position + 1] = {x.generator, y.sign};
  out.letters[position + 2] = {y.generator, x.sign};
  return out;
}

std::vector<std::size_t> commute_positions(const BraidWord& word) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (std::abs(word.letters[i].generator - word.letters[i + 1].generator) >=
        2) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> braid_relation_positions(const BraidWord& word) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 2 < word.size(); ++i) {
    const BraidLetter& x = word.letters[i];
    const BraidLetter& y = word.letters[i + 1];
    const BraidLetter& z = word.letters[i + 2];
    if (x.generator == z.generator &&
        std::abs(x.generator - y.generator) == 1 &&
        (y.sign == x.sign || y.sign == z.sign)) {
      out.push_back(i);
    }
  }
  return out;
}

namespace {

bool within_bounds(const BraidWord& w, const EquivalentOptions& opts) {
  return static_cast<int>(w.size()) <= opts.max_length &&
         w.strands <= opts.max_strands;
}

}  // namespace

BraidWord random_equivalent(const BraidWord& word, int move_count,
                            const EquivalentOptions& opts, std::uint64_t seed,
                            std::vector<MoveRecord>* log) {
  rng::Engine eng(seed);
  BraidWord cur = word;
  for (int step = 0; step < move_count; ++step) {
    const int choice = eng.int_in(0, 7);
    BraidWord next = cur;
    MoveRecord rec{};
    bool applied = false;
    switch (choice) {
      case 0: {  // conjugation
        if (cur.strands < 2) break;
        const int gen = eng.int_in(1, cur.strands - 1);
        const int sign = eng.coin(0.5) ? 1 : -1;
        next = conjugate(cur, {gen, sign});
        rec = {MoveKind::Conjugate, 0, 0};
        applied = true;
        break;
      }
      case 1: {  // stabilization
        const int sign = eng.coin(0.5) ? 1 : -1;
        if (cur.strands + 1 > opts.max_strands) break;
        next = stabilize(cur, sign, opts.max_strands);
        rec = {sign > 0 ? MoveKind::StabilizePos : MoveKind::StabilizeNeg,
               sign, 1};
        applied = true;
        break;
      }
      case 2: {  // destabilization
        try {
          next = destabilize(cur);
        } catch (const NotDestabilizable&) {
          break;
        }
        rec = {MoveKind::Destabilize, writhe(next) - writhe(cur), -1};
        applied = true;
        break;
      }
      case 3: {  // far commutation
        const auto positions = commute_positions(cur);
        if (positions.empty()) break;
        const auto pos = positions[eng.below(positions.size())];
        next = apply_relation_move(cur, pos, RelationMove::Commute);
        rec = {MoveKind::Commute, 0, 0};
        applied = true;
        break;
      }
      case 4: {  // braid relation
        const auto positions = braid_relation_positions(cur);
        if (positions.empty()) break;
        const auto pos = positions[eng.below(positions.size())];
        next = apply_relation_move(cur, pos, RelationMove::BraidRelation);
        rec = {MoveKind::BraidRelation, 0, 0};
        applied = true;
        break;
      }
      case 5: {  // free insertion of sigma^e sigma^-e
        if (cur.strands < 2) break;
        const int gen = eng.int_in(1, cur.strands - 1);
        const int sign = eng.coin(0.5) ? 1 : -1;
        const std::size_t at = eng.below(cur.size() + 1);
        next = cur;
        next.letters.insert(
            next.letters.begin() + static_cast<std::ptrdiff_t>(at),
            {BraidLetter{gen, sign}, BraidLetter{gen, -sign}});
        rec = {MoveKind::FreeInsert, 0, 0};
        applied = true;
        break;
      }
      case 6: {  // free reduction
        next = free_reduce(cur);
        if (next.size() == cur.size()) break;
        rec = {MoveKind::FreeReduce, writhe(next) - writhe(cur), 0};
        applied = true;
        break;
      }
      case 7: {  // cyclic rotation
        if (cur.size() < 2) break;
        const std::size_t at = 1 + eng.below(cur.size() - 1);
        next = rotate(cur, at);
        rec = {MoveKind::CyclicRotate, 0, 0};
        applied = true;
        break;
      }
    }
    if (!applied || !within_bounds(next, opts)) continue;
    cur = std::move(next);
    if (log) log->push_back(rec);
  }
  return cur;
}

namespace {

using Letters = std::vector<BraidLetter>;

void free_reduce_in_place(Letters& w) {
  Letters out;
  out.reserve(w.size());
  for (const BraidLetter& l : w) {
    if (!out.empty() && out.back().generator == l.generator &&
        out.back().sign == -l.sign) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  w = std::move(out);
}

// Leftmost-closing handle: the smallest t for which the nearest earlier
// letter p with generator <= gen(t) has the same generator and opposite
// sign. Such a handle encloses no other handle, which is the precondition
// for Dehornoy's termination guarantee.
std::optional<std::pair<std::size_t, std::size_t>> find_handle(
    const Letters& w) {
  for (std::size_t t = 1; t < w.size(); ++t) {
    const int g = w[t].generator;
    for (std::size_t p = t; p-- > 0;) {
      if (w[p].generator > g) continue;
      if (w[p].generator == g && w[p].sign == -w[t].sign) {
        return std::make_pair(p, t);
      }
      break;
    }
  }
  return std::nullopt;
}

}  // namespace

BraidWord handle_reduce(const BraidWord& word, std::uint64_t budget) {
  Letters w = word.letters;
  free_reduce_in_place(w);
  std::uint64_t steps = 0;
  while (auto handle = find_handle(w)) {
    if (++steps > budget) {
      throw BudgetExceeded("handle reduction exceeded " +
                           std::to_string(budget) + " steps");
    }
    const auto [p, t] = *handle;
    const int g = w[p].generator;
    const int e = w[p].sign;
    Letters repl;
    repl.reserve(3 * (t - p));
    for (std::size_t q = p + 1; q < t; ++q) {
      if (w[q].generator == g + 1) {
        repl.push_back({g + 1, -e});
        repl.push_back({g, w[q].sign});
        repl.push_back({g + 1, e});
      } else {
        repl.push_back(w[q]);
      }
    }
    Letters next;
    next.reserve(w.size() - 2 + repl.size());
    next.insert(next.end(), w.begin(),
                w.begin() + static_cast<std::ptrdiff_t>(p));
    next.insert(next.end(), repl.begin(), repl.end());
    next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(t) + 1,
                w.end());
    free_reduce_in_place(next);
    w = std::move(next);
  }
  return {std::move(w), word.strands};
}

bool words_equal(const BraidWord& w1, const BraidWord& w2,
                 std::uint64_t budget) {
  if (w1.strands != w2.strands) {
    throw std::invalid_argument(
        "words_equal requires equal strand counts; pad the smaller word");
  }
  if (permutation(w1) != permutation(w2)) return false;
  const BraidWord product = concat(w1, inverse(w2));
  return handle_reduce(product, budget).empty();
}

}  // namespace knotnet::braid
