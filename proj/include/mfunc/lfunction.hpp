#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mfunc/characters.hpp"
#include "mfunc/primes.hpp"
#include "mfunc/tau.hpp"

namespace mfunc {

//! Zero-density constants; not used computationally, only echoed into the
//! error-budget formulas and documentation.
struct LMetadata {
  std::optional<double> d_F;  // degree (functional equation data)
  std::optional<double> b;    // weak zero-density exponent
  std::optional<double> c;    // strong zero-density exponent
  std::optional<double> A;    // strong zero-density log power
};

//! An L-function with a polynomial Euler product: per-prime local roots
//! alpha_1(p), ..., alpha_g(p), all of modulus at most 1.  Ramified primes
//! carry zero roots so the degree g is uniform.
class LFunctionSpec {
public:
  using Roots = std::vector<std::complex<double>>;

  const std::string& name() const { return impl_->name; }
  int degree() const { return impl_->g; }
  std::optional<double> kappa_expected() const { return impl_->kappa; }
  const LMetadata& metadata() const { return impl_->meta; }
  //! True when Lambda_F is real-valued (conjugate-symmetric characteristic data).
  bool real_coefficients() const { return impl_->real_coeffs; }
  //! Largest prime with available roots; requests beyond it throw.
  std::uint64_t coverage_limit() const { return impl_->coverage; }

  //! Local roots at a prime p (lazily computed, cached, thread-safe).
  Roots local_roots(std::uint64_t p) const {
    auto& im = *impl_;
    {
      std::lock_guard<std::mutex> lock(im.cache_mu);
      auto it = im.cache.find(p);
      if (it != im.cache.end()) return it->second;
    }
    if (p > im.coverage)
      throw std::out_of_range(im.name + ": no local roots beyond p = " + std::to_string(im.coverage) +
                              " (requested " + std::to_string(p) + ")");
    if (!is_prime_u64(p)) throw std::invalid_argument("local_roots: " + std::to_string(p) + " is not prime");
    Roots r = im.compute(p);
    if (static_cast<int>(r.size()) != im.g)
      throw std::logic_error(im.name + ": backend returned wrong root count");
    std::lock_guard<std::mutex> lock(im.cache_mu);
    return im.cache.emplace(p, std::move(r)).first->second;
  }

  LFunctionSpec with_metadata(LMetadata m) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->meta = m;
    return LFunctionSpec(std::move(impl));
  }

  // --- built-ins -----------------------------------------------------------

  static LFunctionSpec zeta() {
    auto impl = std::make_shared<Impl>();
    impl->name = "zeta";
    impl->g = 1;
    impl->kappa = 1.0;
    impl->meta = LMetadata{1.0, 16.0, {}, {}};  // b = 4(d_F + 3)
    impl->real_coeffs = true;
    impl->coverage = UINT64_MAX;
    impl->compute = [](std::uint64_t) { return Roots{{1.0, 0.0}}; };
    return LFunctionSpec(std::move(impl));
  }

  static LFunctionSpec dirichlet(std::uint32_t q, std::uint32_t index) {
    auto chi = std::make_shared<DirichletCharacter>(q, index);
    if (!chi->is_primitive()) {
      std::ostringstream os;
      os << "dirichlet:q=" << q << ",index=" << index << " is not primitive (conductor "
         << chi->conductor() << ")";
      throw std::invalid_argument(os.str());
    }
    auto impl = std::make_shared<Impl>();
    {
      std::ostringstream os;
      os << "dirichlet:q=" << q << ",index=" << index;
      impl->name = os.str();
    }
    impl->g = 1;
    impl->kappa = 1.0;
    impl->meta = LMetadata{1.0, 16.0, {}, {}};
    impl->real_coeffs = chi->is_real();
    impl->coverage = UINT64_MAX;
    impl->compute = [chi](std::uint64_t p) { return Roots{(*chi)(p)}; };
    return LFunctionSpec(std::move(impl));
  }

  //! L-function of the discriminant cusp form (level 1, weight 12), with
  //! unitary normalization a(p) = tau(p) / p^(11/2).  Roots are the unit-
  //! circle pair solving z^2 - a z + 1 = 0.  Coverage is the largest prime
  //! whose tau value is tabulated; beyond it requests fail loudly.
  static LFunctionSpec delta(std::uint64_t coverage = 10000) {
    auto data = std::make_shared<DeltaTable>();
    data->n_max = coverage;
    auto impl = std::make_shared<Impl>();
    impl->name = "delta";
    impl->g = 2;
    impl->kappa = 1.0;  // Rankin-Selberg
    impl->meta = LMetadata{2.0, 20.0, {}, {}};
    impl->real_coeffs = true;
    impl->coverage = coverage;
    impl->compute = [data](std::uint64_t p) {
      std::call_once(data->once, [&] { data->tau = ramanujan_tau_table(data->n_max); });
      const double a = static_cast<double>(data->tau[p]) / std::pow(static_cast<double>(p), 5.5);
      if (!(std::abs(a) <= 2.0))
        throw std::logic_error("delta: |a(p)| > 2 (tau table corrupt?)");
      const double re = a / 2.0;
      const double im = std::sqrt(std::max(0.0, 1.0 - re * re));
      return Roots{{re, im}, {re, -im}};
    };
    return LFunctionSpec(std::move(impl));
  }

  //! Spec from an explicit root table (see load_spec_table).
  static LFunctionSpec custom(std::string name, int g, std::map<std::uint64_t, Roots> table,
                              std::optional<double> kappa = {}, LMetadata meta = {}) {
    if (g <= 0) throw std::invalid_argument("custom spec: g must be positive");
    for (auto& [p, roots] : table)
      if (static_cast<int>(roots.size()) != g)
        throw std::invalid_argument("custom spec: row at p = " + std::to_string(p) +
                                    " has wrong root count");
    bool real = true;
    for (auto& [p, roots] : table) {
      // real coefficients iff every root multiset is closed under conjugation
      for (auto& r : roots) {
        bool found = false;
        for (auto& s : roots)
          if (std::abs(std::conj(r) - s) < 1e-12) {
            found = true;
            break;
          }
        if (!found) real = false;
      }
    }
    // coverage: largest P such that every prime <= P has a row
    std::uint64_t cov = 1;
    if (!table.empty()) {
      PrimeTable pt(table.rbegin()->first);
      cov = table.rbegin()->first;
      for (auto p : pt.primes())
        if (!table.count(p)) {
          cov = p - 1;
          break;
        }
    }
    auto shared_table = std::make_shared<std::map<std::uint64_t, Roots>>(std::move(table));
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->g = g;
    impl->kappa = kappa;
    impl->meta = meta;
    impl->real_coeffs = real;
    impl->coverage = cov;
    impl->compute = [shared_table](std::uint64_t p) {
      auto it = shared_table->find(p);
      if (it == shared_table->end())
        throw std::out_of_range("custom spec: no roots for p = " + std::to_string(p));
      return it->second;
    };
    return LFunctionSpec(std::move(impl));
  }

  //! Selector strings: "zeta", "delta", "delta:coverage=N",
  //! "dirichlet:q=Q,index=K", "table:PATH".
  static LFunctionSpec parse(std::string_view sel);

private:
  struct DeltaTable {
    std::uint64_t n_max = 0;
    std::once_flag once;
    std::vector<tau_int> tau;
  };

  struct Impl {
    Impl() = default;
    Impl(const Impl& o)
        : name(o.name), g(o.g), kappa(o.kappa), meta(o.meta), real_coeffs(o.real_coeffs),
          coverage(o.coverage), compute(o.compute) {}
    std::string name;
    int g = 1;
    std::optional<double> kappa;
    LMetadata meta;
    bool real_coeffs = true;
    std::uint64_t coverage = UINT64_MAX;
    std::function<Roots(std::uint64_t)> compute;
    mutable std::mutex cache_mu;
    mutable std::unordered_map<std::uint64_t, Roots> cache;
  };

  explicit LFunctionSpec(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

namespace detail {

inline std::complex<double> cpow_int(std::complex<double> base, int m) {
  std::complex<double> r{1.0, 0.0};
  while (m > 0) {
    if (m & 1) r *= base;
    base *= base;
    m >>= 1;
  }
  return r;
}

}  // namespace detail

//! Generalized von Mangoldt function: (sum_j alpha_j(p)^m) log p at n = p^m,
//! zero elsewhere.
inline std::complex<double> lambda_f(const LFunctionSpec& spec, std::uint64_t n) {
  auto pp = prime_power_decompose(n);
  if (!pp) return {0.0, 0.0};
  std::complex<double> s{0.0, 0.0};
  for (const auto& a : spec.local_roots(pp->p)) s += detail::cpow_int(a, pp->m);
  return s * std::log(static_cast<double>(pp->p));
}

//! Dirichlet coefficient at a prime: a_F(p) = sum_j alpha_j(p).
inline std::complex<double> coefficient_a(const LFunctionSpec& spec, std::uint64_t p) {
  if (!is_prime_u64(p)) throw std::invalid_argument("coefficient_a: p must be prime");
  std::complex<double> s{0.0, 0.0};
  for (const auto& a : spec.local_roots(p)) s += a;
  return s;
}

//! Prime mean square estimator: (1/pi(x)) sum_{p<=x} |a_F(p)|^2.
inline double estimate_kappa(const LFunctionSpec& spec, std::uint64_t x) {
  if (x < 2) throw std::invalid_argument("estimate_kappa: x must be >= 2");
  if (x > spec.coverage_limit())
    throw std::out_of_range("estimate_kappa: x exceeds root-table coverage");
  PrimeTable pt(x);
  double s = 0.0;
  for (auto p : pt.primes()) s += std::norm(coefficient_a(spec, p));
  return s / static_cast<double>(pt.primes().size());
}

struct SpecViolation {
  std::uint64_t p;
  int root_index;   // -1 for count violations
  double value;     // offending |alpha|
  std::string what;
};

struct ValidationReport {
  std::vector<SpecViolation> violations;
  std::uint64_t p_max = 0;
  bool ok() const { return violations.empty(); }
};

//! Checks the Ramanujan root bound |alpha_j(p)| <= 1 and the root-count
//! invariant for all primes up to pmax.
inline ValidationReport validate_spec(const LFunctionSpec& spec, std::uint64_t pmax) {
  constexpr double kTol = 1e-9;  // rounding slack on |alpha|
  ValidationReport rep;
  rep.p_max = pmax;
  PrimeTable pt(pmax);
  for (auto p : pt.primes()) {
    const auto roots = spec.local_roots(p);
    if (static_cast<int>(roots.size()) != spec.degree()) {
      rep.violations.push_back({p, -1, static_cast<double>(roots.size()), "root count != g"});
      continue;
    }
    for (std::size_t j = 0; j < roots.size(); ++j) {
      const double m = std::abs(roots[j]);
      if (m > 1.0 + kTol)
        rep.violations.push_back({p, static_cast<int>(j), m, "|alpha| > 1"});
    }
  }
  return rep;
}

// Root-table text format:
//   # comment
//   name <identifier>          (optional)
//   g <positive integer>       (required, before rows)
//   kappa <real>               (optional)
//   <p> <re_1> <im_1> ... <re_g> <im_g>
inline LFunctionSpec load_spec_table(std::istream& in, std::string default_name = "custom") {
  std::string name = std::move(default_name);
  int g = 0;
  std::optional<double> kappa;
  std::map<std::uint64_t, LFunctionSpec::Roots> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "name") {
      ls >> name;
    } else if (first == "g") {
      ls >> g;
    } else if (first == "kappa") {
      double k;
      ls >> k;
      kappa = k;
    } else {
      if (g <= 0)
        throw std::invalid_argument("spec table: 'g' must be declared before root rows");
      std::uint64_t p = 0;
      try {
        p = std::stoull(first);
      } catch (...) {
        throw std::invalid_argument("spec table: bad prime on line " + std::to_string(lineno));
      }
      LFunctionSpec::Roots roots;
      for (int j = 0; j < g; ++j) {
        double re, im;
        if (!(ls >> re >> im))
          throw std::invalid_argument("spec table: expected " + std::to_string(2 * g) +
                                      " numbers after p on line " + std::to_string(lineno));
        roots.emplace_back(re, im);
      }
      table[p] = std::move(roots);
    }
  }
  return LFunctionSpec::custom(std::move(name), g, std::move(table), kappa);
}

inline LFunctionSpec LFunctionSpec::parse(std::string_view sel) {
  auto get_kv = [](std::string_view args, std::string_view key) -> std::optional<std::uint64_t> {
    std::string s(args);
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      if (item.substr(0, eq) == key) return std::stoull(item.substr(eq + 1));
    }
    return std::nullopt;
  };
  if (sel == "zeta") return zeta();
  if (sel == "delta") return delta();
  if (sel.rfind("delta:", 0) == 0) {
    auto cov = get_kv(sel.substr(6), "coverage");
    return delta(cov.value_or(10000));
  }
  if (sel.rfind("dirichlet:", 0) == 0) {
    auto args = sel.substr(10);
    auto q = get_kv(args, "q");
    auto idx = get_kv(args, "index");
    if (!q || !idx)
      throw std::invalid_argument("dirichlet selector needs q=...,index=...");
    return dirichlet(static_cast<std::uint32_t>(*q), static_cast<std::uint32_t>(*idx));
  }
  if (sel.rfind("table:", 0) == 0) {
    const std::string path(sel.substr(6));
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec table: " + path);
    auto stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return load_spec_table(in, stem);
  }
  throw std::invalid_argument("unknown L-function selector: " + std::string(sel));
}

}  // namespace mfunc
