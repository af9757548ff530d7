#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mfunc {

//! Complete table of primes up to a fixed limit (sieve of Eratosthenes).
class PrimeTable {
public:
  explicit PrimeTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) return;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i * i <= limit; ++i) {
      if (composite[i]) continue;
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    for (std::uint64_t i = 2; i <= limit; ++i)
      if (!composite[i]) primes_.push_back(i);
  }

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }

  //! pi(x): number of primes <= x. Requires x <= limit().
  std::size_t count_up_to(std::uint64_t x) const {
    if (x > limit_) throw std::out_of_range("PrimeTable: x exceeds sieve limit");
    auto it = std::upper_bound(primes_.begin(), primes_.end(), x);
    return static_cast<std::size_t>(it - primes_.begin());
  }

  bool is_prime(std::uint64_t n) const {
    if (n > limit_) throw std::out_of_range("PrimeTable: n exceeds sieve limit");
    return std::binary_search(primes_.begin(), primes_.end(), n);
  }

private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
};

//! Trial-division primality, adequate for the sizes used here.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

struct PrimePower {
  std::uint64_t p;
  int m;
};

//! Decomposes n = p^m with m >= 1; nullopt when n is not a prime power (or n == 1).
inline std::optional<PrimePower> prime_power_decompose(std::uint64_t n) {
  if (n < 2) return std::nullopt;
  std::uint64_t p = 0;
  if (n % 2 == 0) {
    p = 2;
  } else {
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
      if (n % d == 0) {
        p = d;
        break;
      }
    }
    if (p == 0) return PrimePower{n, 1};  // n itself prime
  }
  int m = 0;
  while (n % p == 0) {
    n /= p;
    ++m;
  }
  if (n != 1) return std::nullopt;
  return PrimePower{p, m};
}

}  // namespace mfunc
