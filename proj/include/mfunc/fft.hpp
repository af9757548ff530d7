#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mfunc/parallel.hpp"

namespace mfunc {

//! In-place radix-2 FFT.  Kernel is exp(-2 pi i jk / n) for the forward
//! direction; no normalization is applied in either direction.
inline void fft_inplace(std::complex<double>* a, std::size_t n, bool inverse) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_inplace: length must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

//! 2D FFT on a row-major n x n array (rows pass, then columns pass).
inline void fft2_inplace(std::vector<std::complex<double>>& a, std::size_t n, bool inverse,
                         unsigned threads = 0) {
  if (a.size() != n * n) throw std::invalid_argument("fft2_inplace: size mismatch");
  parallel_chunks(n, 16, threads, [&](std::size_t r0, std::size_t r1, std::size_t) {
    for (std::size_t r = r0; r < r1; ++r) fft_inplace(a.data() + r * n, n, inverse);
  });
  parallel_chunks(n, 16, threads, [&](std::size_t c0, std::size_t c1, std::size_t) {
    std::vector<std::complex<double>> col(n);
    for (std::size_t c = c0; c < c1; ++c) {
      for (std::size_t r = 0; r < n; ++r) col[r] = a[r * n + c];
      fft_inplace(col.data(), n, inverse);
      for (std::size_t r = 0; r < n; ++r) a[r * n + c] = col[r];
    }
  });
}

}  // namespace mfunc
