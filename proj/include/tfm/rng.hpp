#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tfm::rng {

/// splitmix64 finalizer; used to derive decorrelated stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for the sub-stream identified by a chain of ids (replicate index,
/// stream tag, ...). Identical chains give identical streams, so parallel
/// and serial runs draw the same ensembles.
template <typename... Ids>
std::uint64_t substream(std::uint64_t base, Ids... ids) {
  std::uint64_t s = mix64(base);
  ((s = mix64(s ^ (static_cast<std::uint64_t>(ids) + 0x9e3779b97f4a7c15ull))), ...);
  return s;
}

/// Deterministic normal/uniform sampler. Uniforms come straight from the
/// mt19937_64 word stream and normals from Box-Muller, so sequences do not
/// depend on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace tfm::rng
