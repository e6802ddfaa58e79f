// Seeded random source used by every generation stage.
//
// The standard distributions are implementation-defined, so bounded draws are
// done here by rejection on top of std::mt19937_64. Identical seeds give
// identical streams on every conforming standard library.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

namespace mwp {

// SplitMix64 finalizer. Used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable mixing of a master seed with a sequence of stream coordinates
// (pair index, retry counter, ...).
inline std::uint64_t mix_seed(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t draw;
    do {
      draw = next();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
  }

  std::size_t index(std::size_t size) {
    if (size == 0) throw std::invalid_argument("Rng::index: empty range");
    return static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(size) - 1));
  }

  bool coin() { return (next() >> 63) != 0; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mwp
