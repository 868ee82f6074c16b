#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tunnelswarm {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a over a stream name.
std::uint64_t hash_name(std::string_view name);

/// Seed for the named substream of one robot in one replicate. Robot index
/// -1 addresses scenario-level streams.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate, int robot,
                          std::string_view name);

/// A reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions below are written out
/// by hand so results do not depend on the standard library's implementation.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tunnelswarm
