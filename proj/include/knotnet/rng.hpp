#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace knotnet::rng {

// splitmix64; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix(master ^ mix(stream));
}

// FNV-1a, for turning names into stable sub-seed streams.
inline std::uint64_t hash64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic engine wrapper. All draw functions are defined here rather
// than via std::uniform_*_distribution, whose output is implementation
// defined; this keeps seeded runs bit-identical across toolchains.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x > limit);
    return x % n;
  }

  int int_in(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // uniform real in [0, 1)
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller (one value per call; cache the pair)
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * real01() - 1.0;
      v = 2.0 * real01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double k = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * k;
    has_spare_ = true;
    return u * k;
  }

  bool coin(double p_true) { return real01() < p_true; }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace knotnet::rng
