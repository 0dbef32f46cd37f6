#ifndef RAGULATOR_COMMON_RANDOM_H_
#define RAGULATOR_COMMON_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ragulator {

// SplitMix64 finaliser over (seed, stream). Used to derive independent
// per-record / per-tree sub-seeds so results do not depend on scheduling.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Stable FNV-1a hash of a byte string (platform independent, unlike
// std::hash).
uint64_t StableHash(const void* data, std::size_t size);

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard; the distributions below are implemented here because the
// std:: distributions are implementation-defined and would break
// byte-identical output across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t UniformIndex(std::size_t n);

  // Uniform double in [0, 1) with 53 bits of randomness.
  double Uniform01();

  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ragulator

#endif  // RAGULATOR_COMMON_RANDOM_H_
