#ifndef CTBN_RNG_HPP
#define CTBN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ctbn {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic random stream. Stream `r` derived from (seed, r) is
/// independent of every other stream, so replication batches can be
/// evaluated in any order and still reproduce bit-identically.
///
/// All variates are generated from raw mt19937_64 output (the engine's
/// sequence is fixed by the standard); std::uniform_* distributions are
/// implementation-defined and deliberately avoided.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(detail::splitmix64(detail::splitmix64(seed + 1) ^
                                   detail::splitmix64(stream))) {}

  /// Uniform variate in the open interval (0, 1).
  double uniform01() {
    double u;
    do {
      u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
  }

  /// Exponential holding time with the given rate; strictly positive.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Index in [0, n) drawn proportionally to weights[i] (nonnegative,
  /// not all zero). Scans in index order so the draw is reproducible.
  template <typename Weights>
  int categorical(const Weights& weights, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += weights[i];
    const double u = uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last_positive;  // u landed in the rounding gap at the top
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ctbn

#endif  // CTBN_RNG_HPP
