#pragma once

// Deterministic pseudo-random numbers for reproducible trials.
// SplitMix64 has a fixed output sequence for a given seed on every
// platform, unlike the distribution templates in <random>.

#include <cstdint>
#include <vector>

namespace hyptheta {

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi] inclusive.  Modulo bias is negligible
  // for the small ranges used here and keeps the sequence portable.
  long long range(long long lo, long long hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(next() % span);
  }

  // k distinct integers in [lo, hi], ascending.
  std::vector<long long> distinct(int k, long long lo, long long hi) {
    std::vector<long long> out;
    while (static_cast<int>(out.size()) < k) {
      long long v = range(lo, hi);
      bool seen = false;
      for (long long w : out) seen = seen || (w == v);
      if (!seen) out.push_back(v);
    }
    for (std::size_t i = 1; i < out.size(); ++i)
      for (std::size_t j = i; j > 0 && out[j - 1] > out[j]; --j)
        std::swap(out[j - 1], out[j]);
    return out;
  }

private:
  std::uint64_t state_;
};

}  // namespace hyptheta
