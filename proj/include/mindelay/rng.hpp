#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mindelay {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v,
                               std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// A labeled, seeded stream. Every consumer (request gaps, strategy coin
// flips, source placement, nonces) gets its own label so adding draws in one
// place never shifts the sequence seen by another. Sampling is hand-rolled
// on top of the raw engine output; std::*_distribution is not pinned down
// across standard libraries and would break run-for-run reproducibility.
class RngStream {
 public:
  RngStream(std::string_view label, std::uint64_t seed, std::uint64_t salt = 0)
      : engine_(splitmix64(fnv1a(label) ^ splitmix64(seed ^ 0x5851f42d4c957f2dULL) ^
                           splitmix64(salt ^ 0x14057b7ef767814fULL))) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_exponential(double rate) { return -std::log1p(-next_unit()) / rate; }

  // uniform in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // uniform in [lo, hi]
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  int next_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

// Zipf over {0, ..., count-1}: p(k) proportional to (k+1)^-alpha, so object 0
// is the most popular. Sampling is a binary search over the cumulative table.
class ZipfSampler {
 public:
  ZipfSampler(int count, double alpha) : pmf_(count), cdf_(count) {
    double sum = 0.0;
    for (int k = 0; k < count; ++k) {
      pmf_[k] = std::pow(static_cast<double>(k + 1), -alpha);
      sum += pmf_[k];
    }
    double acc = 0.0;
    for (int k = 0; k < count; ++k) {
      pmf_[k] /= sum;
      acc += pmf_[k];
      cdf_[k] = acc;
    }
    cdf_.back() = 1.0;
  }

  int sample(RngStream& rng) const {
    const double u = rng.next_unit();
    return static_cast<int>(std::lower_bound(cdf_.begin(), cdf_.end(), u) -
                            cdf_.begin());
  }

  double pmf(int k) const { return pmf_[k]; }
  int count() const { return static_cast<int>(pmf_.size()); }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

}  // namespace mindelay
