#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace margint {

//! SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t
mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Deterministic generator: mt19937_64 (bit-identical on every conforming
//! standard library) with uniforms built from the top 53 bits and normals
//! from the Marsaglia polar method. std::normal_distribution is avoided
//! because its output is implementation-defined.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  //! Uniform on the open interval (0, 1).
  double uniform()
  {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0)
        return u;
    }
  }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace margint
