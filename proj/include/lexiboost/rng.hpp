#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lexiboost {

/// Seeded random source with platform-independent derived distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard library's distributions are not, so uniform reals,
/// bounded integers and normal variates are derived here:
///   - uniform01: top 53 bits of one engine draw, scaled to [0, 1)
///   - below(n):  rejection sampling on the engine output (no modulo bias)
///   - normal:    Marsaglia polar method, caching the second variate
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01();
  std::uint64_t below(std::uint64_t bound);
  double normal();

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Derives an independent child seed from a parent seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace lexiboost
