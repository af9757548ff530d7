#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfunc {

using tau_int = __int128;

// Ramanujan tau via the eta product: Delta = q * prod (1-q^n)^24, and
// prod (1-q^n)^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}  (Jacobi), so the
// 24th power is the 8th power of the sparse cube series.  Exact in __int128:
// |tau(n)| < 2 d(n) n^{11/2} keeps every intermediate well below 2^127 for
// the table sizes used here (n <= ~10^5).
inline std::vector<tau_int> ramanujan_tau_table(std::size_t n_max) {
  if (n_max == 0) return {};
  const std::size_t len = n_max;  // coefficients of q^0..q^{n_max-1} of eta^24/q
  std::vector<tau_int> cube(len, 0);
  for (std::size_t k = 0;; ++k) {
    const std::size_t deg = k * (k + 1) / 2;
    if (deg >= len) break;
    cube[deg] = (k % 2 == 0 ? tau_int(2 * k + 1) : -tau_int(2 * k + 1));
  }
  auto square = [len](const std::vector<tau_int>& a) {
    std::vector<tau_int> out(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      const tau_int ai = a[i];
      // symmetric pairs counted once
      if (2 * i < len && a[i] != 0) out[2 * i] += ai * ai;
      for (std::size_t j = i + 1; i + j < len; ++j)
        if (a[j] != 0) out[i + j] += 2 * ai * a[j];
    }
    return out;
  };
  std::vector<tau_int> p = square(square(square(cube)));  // eta^24 / q
  std::vector<tau_int> tau(n_max + 1, 0);
  for (std::size_t n = 1; n <= n_max; ++n) tau[n] = p[n - 1];
  return tau;
}

}  // namespace mfunc
