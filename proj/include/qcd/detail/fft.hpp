#pragma once

#include <complex>
#include <vector>

#include "qcd/errors.hpp"

namespace qcd::detail {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT, sign = -1 for the forward transform
// sum_k v[k] e^{-2 pi i k n / M}.  No normalization.
inline void fft(std::vector<std::complex<double>>& v, int sign) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw PreconditionError("fft: length must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = v[i + k];
        const auto t = v[i + k + len / 2] * w;
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
        w *= wl;
      }
    }
  }
}

}  // namespace qcd::detail
