#pragma once

#include <cstdint>
#include <random>

namespace qcd::detail {

// Deterministic uniform generator.  std::mt19937_64 output is pinned by the
// standard; the distributions below avoid std::uniform_real_distribution,
// whose mapping is implementation-defined, so fixed seeds reproduce the same
// coefficients on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform on {lo, ..., hi} inclusive
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qcd::detail
