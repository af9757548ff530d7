#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mfunc {

namespace detail {

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t r = 1 % mod;
  base %= mod;
  while (exp) {
    if (exp & 1) r = (unsigned __int128)(r)*base % mod;
    base = (unsigned __int128)(base)*base % mod;
    exp >>= 1;
  }
  return r;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::uint64_t primitive_root_mod_p(std::uint64_t p) {
  if (p == 2) return 1;
  const auto qs = prime_factors(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto q : qs)
      if (powmod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root_mod_p: none found");
}

}  // namespace detail

// Dirichlet character mod q, selected by an index into the character group.
//
// The unit group (Z/qZ)* is decomposed into cyclic components: for 2^e with
// e >= 3 the two components <-1> (order 2) and <3> (order 2^(e-2)), then one
// component per odd prime power factor of q in ascending order (generated by
// a primitive root).  With component orders d_1, ..., d_r, the index k in
// [0, phi(q)) is read in mixed radix as k = k_1 + d_1*(k_2 + d_2*(...)), and
// the character maps the i-th generator to exp(2 pi i k_i / d_i).  Index 0 is
// the principal character.
class DirichletCharacter {
public:
  DirichletCharacter(std::uint32_t q, std::uint32_t index) : q_(q), index_(index) {
    if (q == 0) throw std::invalid_argument("DirichletCharacter: q must be positive");
    build();
  }

  std::uint32_t modulus() const { return q_; }
  std::uint32_t index() const { return index_; }
  std::uint32_t conductor() const { return conductor_; }
  bool is_primitive() const { return conductor_ == q_; }
  bool is_real() const { return real_; }
  std::uint32_t group_order() const { return phi_; }

  std::complex<double> operator()(std::uint64_t n) const { return table_[n % q_]; }

private:
  struct Component {
    std::uint64_t gen;    // generator lifted mod q
    std::uint64_t order;  // component order
  };

  void build() {
    // Factor q into prime powers.
    std::vector<std::pair<std::uint64_t, int>> fac;
    {
      std::uint64_t n = q_;
      for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
          int e = 0;
          while (n % d == 0) n /= d, ++e;
          fac.emplace_back(d, e);
        }
      }
      if (n > 1) fac.emplace_back(n, 1);
    }

    std::vector<Component> comps;
    phi_ = 1;
    for (auto [p, e] : fac) {
      std::uint64_t pe = 1;
      for (int i = 0; i < e; ++i) pe *= p;
      const std::uint64_t rest = q_ / pe;
      auto lift = [&](std::uint64_t gen_local) {
        // CRT: x = gen_local (mod pe), x = 1 (mod rest)
        if (rest == 1) return gen_local % q_;
        for (std::uint64_t x = gen_local % pe; x < q_; x += pe)
          if (x % rest == 1) return x;
        throw std::logic_error("DirichletCharacter: CRT lift failed");
      };
      if (p == 2) {
        if (e == 1) continue;  // trivial unit group
        if (e == 2) {
          comps.push_back({lift(3), 2});
          phi_ *= 2;
        } else {
          comps.push_back({lift(pe - 1), 2});
          std::uint64_t half_order = pe / 4;
          comps.push_back({lift(3), half_order});
          phi_ *= 2 * half_order;
        }
      } else {
        std::uint64_t g = detail::primitive_root_mod_p(p);
        if (e > 1 && detail::powmod(g, p - 1, p * p) == 1) g += p;
        const std::uint64_t order = pe / p * (p - 1);
        comps.push_back({lift(g), order});
        phi_ *= order;
      }
    }

    if (index_ >= phi_)
      throw std::invalid_argument("DirichletCharacter: index must be below phi(q)");

    // Mixed-radix exponents of the character.
    std::vector<std::uint64_t> kexp(comps.size());
    {
      std::uint64_t k = index_;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        kexp[i] = k % comps[i].order;
        k /= comps[i].order;
      }
    }

    real_ = true;
    for (std::size_t i = 0; i < comps.size(); ++i)
      if ((2 * kexp[i]) % comps[i].order != 0) real_ = false;

    // Common denominator so phases stay exact rationals.
    std::uint64_t D = 1;
    for (auto& c : comps) D = std::lcm(D, c.order);

    table_.assign(q_, std::complex<double>(0.0, 0.0));
    // Enumerate exponent tuples over the generators.
    std::vector<std::uint64_t> ex(comps.size(), 0);
    for (;;) {
      std::uint64_t val = 1 % q_;
      std::uint64_t num = 0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        val = val * detail::powmod(comps[i].gen, ex[i], q_) % q_;
        num = (num + ex[i] * kexp[i] % D * (D / comps[i].order)) % D;
      }
      table_[val] = root_of_unity(num, D);
      std::size_t i = 0;
      for (; i < comps.size(); ++i) {
        if (++ex[i] < comps[i].order) break;
        ex[i] = 0;
      }
      if (i == comps.size()) break;
    }
    if (q_ == 1) table_[0] = 1.0;
    if (q_ == 2) table_[1] = 1.0;

    conductor_ = compute_conductor();
  }

  static std::complex<double> root_of_unity(std::uint64_t num, std::uint64_t den) {
    num %= den;
    if (num == 0) return {1.0, 0.0};
    if (2 * num == den) return {-1.0, 0.0};
    if (4 * num == den) return {0.0, 1.0};
    if (4 * num == 3 * den) return {0.0, -1.0};
    const double t = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(t), std::sin(t)};
  }

  std::uint32_t compute_conductor() const {
    for (std::uint32_t f = 1; f <= q_; ++f) {
      if (q_ % f != 0) continue;
      bool ok = true;
      for (std::uint64_t n = 1 + f; n <= q_ && ok; n += f)
        if (std::gcd<std::uint64_t>(n, q_) == 1 && std::abs(table_[n % q_] - std::complex<double>(1.0, 0.0)) > 1e-9)
          ok = false;
      if (ok) return f;
    }
    return q_;
  }

  std::uint32_t q_, index_;
  std::uint32_t phi_ = 1;
  std::uint32_t conductor_ = 1;
  bool real_ = true;
  std::vector<std::complex<double>> table_;
};

}  // namespace mfunc
