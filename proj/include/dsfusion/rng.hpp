#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace dsfusion {

// SplitMix64 finalizer (Steele, Lea & Flood); used for seeding and for
// deriving independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for sub-stream `index` of `seed`, e.g. one per evaluation repeat.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64(seed).
// Fixed algorithm so partitions reproduce on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t s_[4];
};

// Fisher-Yates, drawing j uniformly from [0, i] for i = n-1 .. 1.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace dsfusion
