#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace gaussmlc {

/// splitmix64 step; used to condition raw seeds and derive sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic, splittable random generator.
///
/// The bit stream comes from std::mt19937_64 (fully specified by the
/// standard) seeded through splitmix64; uniforms are built explicitly from
/// the top 53 bits and normals via the Marsaglia polar method, so every draw
/// is reproducible from the seed alone. derive(tag) yields an independent
/// sub-stream for sharded work.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
  }

  std::uint64_t seed() const { return seed_; }

  /// Independent sub-stream; children with distinct tags never collide.
  Rng derive(std::uint64_t tag) const {
    std::uint64_t s = seed_ ^ (0xD1B54A32D192ED03ull * (tag + 1));
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal (polar method, one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd gaussian_vector(int d) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = normal();
    return x;
  }

  /// Uniform point on the unit sphere S^{d-1}.
  Eigen::VectorXd unit_vector(int d) {
    Eigen::VectorXd x = gaussian_vector(d);
    double n = x.norm();
    while (n < 1e-12) {
      x = gaussian_vector(d);
      n = x.norm();
    }
    return x / n;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gaussmlc
