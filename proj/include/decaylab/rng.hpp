#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace decaylab {

// Deterministic, seedable randomness with independent substreams.
//
// Substreams are derived from (seed, stream id) through SplitMix64, so a
// Monte Carlo task partitioned into batches produces the same numbers no
// matter how batches are scheduled. Raw uniforms are generated from the
// mt19937_64 engine directly (the engine is specified bit-exactly by the
// standard; std:: distributions are not), which keeps outputs identical
// across standard libraries.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t s = seed ^ (0xa0761d6478bd642fULL * (stream + 1));
    std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
    engine_.seed(seq);
  }

  // substream derived from this stream's identity; independent of draw order
  static Rng substream(uint64_t seed, uint64_t task_id) { return Rng(seed, task_id); }

  uint64_t next_u64() { return engine_(); }

  // uniform on [0,1) with 53 random bits
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n) by rejection (exact, portable)
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // index sampled from a probability vector via its running CDF
  int pick(const std::vector<double>& cdf) {
    double u = u01();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (u < cdf[static_cast<size_t>(mid)]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> running_cdf(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

}  // namespace decaylab
