#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ldf {

// Seedable generator with a fully specified draw procedure so that panels are
// reproducible bit-for-bit across platforms. mt19937_64 output is pinned by
// the standard; the distributions below are implemented here because the
// standard library's std::normal_distribution is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Consumes exactly two uniforms per draw;
  // the sine branch is discarded to keep the draw order trivial to document.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], log is safe
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n). Consumes one uniform.
  int uniform_int(int n) {
    const int v = static_cast<int>(uniform() * n);
    return v >= n ? n - 1 : v;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ldf
