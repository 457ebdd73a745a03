#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace aeot {

// Seeded random source with a portable, serializable state.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are not (their algorithms are
// implementation-defined), so every transform used here is written out:
//   uniform()  : top 53 bits of one engine draw, scaled to [0, 1)
//   below(n)   : rejection sampling on the top bits, unbiased
//   normal()   : Box-Muller, cosine branch only; consumes two draws and
//                keeps no cached second value, so the state is the engine alone
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  double normal();

  std::uint64_t next_u64() { return engine_(); }

  // Text form of the engine state (the standard stream format of mt19937_64).
  std::string state() const;
  static Rng from_state(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// Independent seed for a named sub-stream (splitmix64 finalizer), so one
// user seed can drive several generators without sharing a sequence.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aeot
