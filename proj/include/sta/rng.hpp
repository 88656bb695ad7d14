#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sta {

// Deterministic 64-bit generator (splitmix64). Streams are identical across
// platforms for a given seed; std::shuffle / std::uniform_int_distribution
// are implementation-defined and would break byte-reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derive an independent stream from (seed, tag). FNV-1a over the tag,
  // folded into the seed, so per-class / per-example streams do not collide.
  static uint64_t mix(uint64_t seed, std::string_view tag) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : tag) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    return mix(seed, h);
  }

  static uint64_t mix(uint64_t seed, uint64_t tag) {
    Rng r(seed ^ (tag * 0x9E3779B97F4A7C15ULL));
    return r.next();
  }

 private:
  uint64_t state_;
};

}  // namespace sta
