#ifndef CXGDIAL_RNG_HPP
#define CXGDIAL_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace cxgdial {

// Mixes two seeds into one (splitmix64 finalizer). Used to derive
// independent sub-streams, e.g. one per fold or per region.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Deterministic random source. std::mt19937_64 is fully specified by the
// standard; the bounded draws and shuffle below are implemented here rather
// than with std::uniform_int_distribution / std::shuffle, whose outputs are
// implementation-defined. Identical seeds therefore give identical streams
// on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t next_u64() { return engine_(); }

  // Unbiased draw in [0, bound). bound must be > 0.
  uint64_t below(uint64_t bound);

  size_t index(size_t n) { return static_cast<size_t>(below(n)); }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  Rng derive(uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace cxgdial

#endif  // CXGDIAL_RNG_HPP
