#pragma once

#include <cstdint>
#include <random>

namespace sbfe {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with hand-rolled draw helpers. mt19937_64 output is fully
// specified by the standard; the std:: distributions are not, and we need
// bit-identical results across compilers for reproducible reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent stream `index` derived from `master` by counter. Streams can
  // be consumed in any order (or in parallel) with identical results.
  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(splitmix64(master) ^ splitmix64(0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sbfe
