#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace msent {

// Seed for every randomized routine. Same seed + same parameters gives a
// bitwise-identical result on any platform this library builds on.
struct Seed {
  uint64_t value = 0;
};

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic seed derivation for independent substreams
// (replica indices, restart indices, per-graph/per-scale streams).
inline Seed derive_seed(Seed base, uint64_t stream) {
  uint64_t s = base.value;
  uint64_t a = detail::splitmix64(s);
  s ^= stream + 0x9e3779b97f4a7c15ull;
  uint64_t b = detail::splitmix64(s);
  return Seed{a ^ (b + 0x165667b19e3779f9ull)};
}

inline Seed derive_seed(Seed base, uint64_t s1, uint64_t s2) {
  return derive_seed(derive_seed(base, s1), s2);
}

inline Seed derive_seed(Seed base, uint64_t s1, uint64_t s2, uint64_t s3) {
  return derive_seed(derive_seed(base, s1, s2), s3);
}

// FNV-1a, used to fold string ids into seed streams.
inline uint64_t hash64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// mt19937_64 plus bias-free bounded draws. std::*_distribution is not
// pinned by the standard, so bounded ints and unit reals are done here.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t below(uint64_t n) {
    const uint64_t limit = n * (UINT64_MAX / n);
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform unordered pair of distinct nodes in [0, n).
  std::pair<int, int> distinct_pair(int n) {
    int a = static_cast<int>(below(static_cast<uint64_t>(n)));
    int b = static_cast<int>(below(static_cast<uint64_t>(n) - 1));
    if (b >= a) ++b;
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace msent
