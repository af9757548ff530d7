#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "mfunc/lfunction.hpp"
#include "mfunc/localfactor.hpp"
#include "mfunc/parallel.hpp"
#include "mfunc/primes.hpp"
#include "mfunc/special.hpp"

namespace mfunc {

//! Smoothing weight: 1 on [1, X], log(X^2/n)/log X on [X, X^2], 0 beyond.
inline double weight_w(double X, std::uint64_t n) {
  if (!(X > 1.0)) throw std::invalid_argument("weight_w: X must exceed 1");
  if (n < 1) throw std::invalid_argument("weight_w: n must be positive");
  const double nd = static_cast<double>(n);
  if (nd <= X) return 1.0;
  if (nd >= X * X) return 0.0;
  return std::log(X * X / nd) / std::log(X);
}

enum class ApproximantVariant { f, g, h };

struct ApproximantConfig {
  LFunctionSpec spec;
  double sigma;
  double X;
  ApproximantVariant variant = ApproximantVariant::f;
};

//! Dirichlet polynomial approximant to F'/F(sigma + it):
//!   f: -sum_{n<=X^2} Lambda_F(n) w_X(n) n^(-sigma-it)
//!   g: the same without the weight
//!   h: -sum_{p<=X^2} sum_m Lambda_F(p^m) p^(-m(sigma+it)), m-sums truncated
//!      with the geometric tail certificate of the local series machinery.
class Approximant {
public:
  explicit Approximant(ApproximantConfig cfg, double h_tail_tol = 1e-12)
      : cfg_(std::move(cfg)) {
    if (!(cfg_.X > 1.0)) throw std::invalid_argument("Approximant: X must exceed 1");
    if (!(cfg_.sigma > 0.5)) throw std::domain_error("Approximant: requires sigma > 1/2");
    const double X2 = cfg_.X * cfg_.X;
    const auto pmax = static_cast<std::uint64_t>(X2);
    PrimeTable pt(pmax);
    if (cfg_.variant == ApproximantVariant::h) {
      const double per_prime = h_tail_tol / std::max<std::size_t>(1, pt.primes().size());
      for (auto p : pt.primes()) {
        const LocalSeries s = local_series(cfg_.spec, p, cfg_.sigma, per_prime);
        for (int m = 1; m <= s.m_max; ++m) {
          logn_.push_back(m * s.log_p);
          coeff_.push_back(-s.coeffs[m - 1]);
        }
        tail_cert_ += s.tail_bound;
      }
    } else {
      for (auto p : pt.primes()) {
        for (std::uint64_t n = p; n <= pmax && static_cast<double>(n) <= X2;) {
          const double w =
              cfg_.variant == ApproximantVariant::f ? weight_w(cfg_.X, n) : 1.0;
          if (w > 0.0) {
            const std::complex<double> lam = lambda_f(cfg_.spec, n);
            const std::complex<double> c =
                -lam * w * std::pow(static_cast<double>(n), -cfg_.sigma);
            if (c != std::complex<double>{0.0, 0.0}) {
              logn_.push_back(std::log(static_cast<double>(n)));
              coeff_.push_back(c);
            }
          }
          if (n > pmax / p) break;  // next power would overflow the cutoff
          n *= p;
        }
      }
      // deterministic order: ascending n
      std::vector<std::size_t> order(logn_.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return logn_[a] < logn_[b]; });
      std::vector<double> ln(order.size());
      std::vector<std::complex<double>> cf(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        ln[i] = logn_[order[i]];
        cf[i] = coeff_[order[i]];
      }
      logn_ = std::move(ln);
      coeff_ = std::move(cf);
    }
  }

  const ApproximantConfig& config() const { return cfg_; }
  double tail_cert() const { return tail_cert_; }
  std::size_t term_count() const { return logn_.size(); }

  double coeff_abs_sum() const {
    double s = 0;
    for (const auto& c : coeff_) s += std::abs(c);
    return s;
  }

  std::complex<double> operator()(double t) const {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < logn_.size(); ++i) {
      const double ph = -t * logn_[i];
      acc += coeff_[i] * std::complex<double>{std::cos(ph), std::sin(ph)};
    }
    return acc;
  }

  //! Values at t_j = t0 + j dt, using per-term incremental phase stepping
  //! inside fixed chunks; output is identical for every thread count.
  std::vector<std::complex<double>> evaluate_progression(double t0, double dt, std::size_t count,
                                                         unsigned threads = 0) const {
    std::vector<std::complex<double>> out(count);
    constexpr std::size_t kChunk = 2048;
    parallel_chunks(count, kChunk, threads, [&](std::size_t b, std::size_t e, std::size_t) {
      const std::size_t len = e - b;
      std::vector<std::complex<double>> acc(len, {0.0, 0.0});
      const double tb = t0 + static_cast<double>(b) * dt;
      for (std::size_t i = 0; i < logn_.size(); ++i) {
        const double ln = logn_[i];
        const std::complex<double> c = coeff_[i];
        const double ph0 = -tb * ln;
        std::complex<double> cur{std::cos(ph0), std::sin(ph0)};
        const std::complex<double> step{std::cos(dt * ln), -std::sin(dt * ln)};
        for (std::size_t j = 0; j < len; ++j) {
          acc[j] += c * cur;
          cur *= step;
        }
      }
      std::copy(acc.begin(), acc.end(), out.begin() + b);
    });
    return out;
  }

private:
  ApproximantConfig cfg_;
  std::vector<double> logn_;
  std::vector<std::complex<double>> coeff_;
  double tail_cert_ = 0;
};

//! Parameter schedule in T, including the box half-width of Omega.
struct ScheduleParams {
  double theta = 0, delta = 0, T = 0;
  double theta1 = 0, theta2 = 0, theta3 = 0;
  double X = 0, Y = 0;
  long N = 0;
  double omega_half_width = 0;
};

inline ScheduleParams schedule(double theta, double delta, double T) {
  if (!(theta > 0) || !(delta > 0))
    throw std::invalid_argument("schedule: theta and delta must be positive");
  if (!(delta + 3.0 * theta < 0.5))
    throw std::invalid_argument("schedule: hypothesis delta + 3*theta < 1/2 violated");
  if (!(T > std::numbers::e)) throw std::invalid_argument("schedule: T must exceed e");
  ScheduleParams s;
  s.theta = theta;
  s.delta = delta;
  s.T = T;
  const double L = std::log(T);
  s.theta1 = 5.0 / 3.0 * theta;
  s.theta2 = (s.theta1 + 1.0 - theta) / 2.0;
  s.theta3 = ((2.0 * delta + theta + 2.0 * s.theta1) + (1.0 - s.theta1)) / 2.0;
  s.X = std::exp(std::pow(L, s.theta1));
  s.Y = std::exp(std::pow(L, s.theta2));
  s.N = 2 * static_cast<long>(std::floor(std::pow(L, s.theta3)));
  s.omega_half_width = std::pow(L, delta);
  return s;
}

//! The four displayed error-term shapes, implied constants set to one.
//! Values are shape-only diagnostics, not rigorous bounds; they are also
//! exposed in natural logs because the shapes overflow long before the
//! asymptotic regime.
struct ErrorBudget {
  double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
  double log_e1 = 0, log_e2 = 0, log_e3 = 0, log_e4 = 0;
  // echoed inputs
  double T = 0, X = 0, Y = 0, sigma = 0, z_abs = 0;
  long N = 0;
  int g = 0;
  double b = 0, c = 0, A = 0, epsilon = 0;
  bool class2 = false;
};

namespace detail {

inline double log_add(double la, double lb) {
  if (la == -std::numeric_limits<double>::infinity()) return lb;
  if (lb == -std::numeric_limits<double>::infinity()) return la;
  const double m = std::max(la, lb);
  return m + std::log1p(std::exp(std::min(la, lb) - m));
}

inline double saturated_exp(double lx) {
  if (lx > 700.0) return std::numeric_limits<double>::max();
  return std::exp(lx);
}

}  // namespace detail

inline ErrorBudget error_budget(const LFunctionSpec& spec, const ScheduleParams& params,
                                double sigma, double z_abs, bool class2,
                                double epsilon = std::numeric_limits<double>::quiet_NaN()) {
  const auto& meta = spec.metadata();
  if (!class2 && !meta.b) throw std::invalid_argument("error_budget: metadata b missing");
  if (class2 && (!meta.c || !meta.A))
    throw std::invalid_argument("error_budget: metadata c or A missing");
  if (!(sigma > 0.5)) throw std::domain_error("error_budget: requires sigma > 1/2");

  ErrorBudget out;
  out.T = params.T;
  out.X = params.X;
  out.Y = params.Y;
  out.N = params.N;
  out.sigma = sigma;
  out.z_abs = z_abs;
  out.g = spec.degree();
  out.class2 = class2;

  const double L = std::log(params.T);
  const double lX = std::log(params.X);
  const double lY = std::log(params.Y);
  const double lg = std::log(static_cast<double>(spec.degree()));
  const double lz = z_abs > 0 ? std::log(z_abs) : -std::numeric_limits<double>::infinity();
  const double N = static_cast<double>(params.N);
  const double neg_inf = -std::numeric_limits<double>::infinity();

  // --- E1 -------------------------------------------------------------------
  double gap;  // sigma offset in the zero-free strip shape
  double log_zero_term;
  if (!class2) {
    const double b = *meta.b;
    out.b = b;
    if (std::isnan(epsilon)) epsilon = sigma - (1.0 - 1.0 / b);
    if (!(epsilon > 0) || !(sigma - (1.0 - 1.0 / b + epsilon / 2.0) > 0))
      throw std::invalid_argument("error_budget: sigma outside the admissible S_I range");
    out.epsilon = epsilon;
    gap = sigma - (1.0 - 1.0 / b + epsilon / 2.0);
    log_zero_term = lY - (b / 2.0) * gap * L;
  } else {
    out.c = *meta.c;
    out.A = *meta.A;
    gap = sigma - 0.5;
    log_zero_term = lY - (out.c / 2.0) * gap * L + out.A * std::log(L);
  }
  double log_e1 = detail::log_add(-L, log_zero_term);
  {
    // |z|/log X * ( X logY logT / Y + X^{-gap/2} logT / gap^2 + X/T + X^{-sigma} log^2 T )
    double lblock = detail::log_add(lX + std::log(lY) + std::log(L) - lY,
                                    -0.5 * gap * lX + std::log(L) - 2.0 * std::log(gap));
    lblock = detail::log_add(lblock, lX - L);
    lblock = detail::log_add(lblock, -sigma * lX + 2.0 * std::log(L));
    if (z_abs > 0) log_e1 = detail::log_add(log_e1, lz - std::log(lX) + lblock);
  }
  out.log_e1 = log_e1;
  out.e1 = detail::saturated_exp(log_e1);

  // --- E2 -------------------------------------------------------------------
  if (z_abs > 0) {
    out.log_e2 = lg + lz + std::log(lX) - 0.5 * std::log(2.0 * sigma - 1.0) +
                 0.5 * detail::log_add(0.0, 2.0 * lX - L) + (0.5 - sigma) * lX;
    out.e2 = detail::saturated_exp(out.log_e2);
  } else {
    out.log_e2 = neg_inf;
    out.e2 = 0.0;
  }

  // --- E3 -------------------------------------------------------------------
  {
    const double l_first = N * lg + 5.0 * N * lX - L + 0.5 * N * std::log1p(z_abs * z_abs);
    double l_second = neg_inf;
    if (z_abs > 0) {
      const double l_pref = N * (std::log(8.0) + lg + lz) - std::lgamma(N + 1.0) +
                            detail::log_add(0.0, N * lX - L);
      const double l_brace =
          detail::log_add(N * std::log(std::sqrt(zeta_real(2.0 * sigma)) * lX) +
                              std::lgamma(N / 2.0 + 1.0),
                          N * std::log(std::abs(zeta_prime_real(2.0 * sigma))));
      l_second = l_pref + l_brace;
    }
    out.log_e3 = detail::log_add(l_first, l_second);
    out.e3 = detail::saturated_exp(out.log_e3);
  }

  // --- E4 -------------------------------------------------------------------
  if (z_abs > 0) {
    out.log_e4 = lg + lz + std::log(lX) - std::log(2.0 * sigma - 1.0) + (1.0 - 2.0 * sigma) * lX;
    out.e4 = detail::saturated_exp(out.log_e4);
  } else {
    out.log_e4 = neg_inf;
    out.e4 = 0.0;
  }
  return out;
}

//! Direct truncated Dirichlet series for F'/F (sigma > 1 cross-check):
//! -sum over prime powers n <= n_trunc of Lambda_F(n) n^{-sigma-it}, with an
//! unconditional tail certificate from Chebyshev bounds.
struct DirectSeries {
  std::vector<double> logn;
  std::vector<std::complex<double>> coeff;
  double tail_cert = 0;
};

inline DirectSeries direct_series(const LFunctionSpec& spec, double sigma,
                                  std::uint64_t n_trunc) {
  if (!(sigma > 1.0)) throw std::domain_error("direct_series: requires sigma > 1");
  DirectSeries d;
  for (std::uint64_t n = 2; n <= n_trunc; ++n) {
    const auto pp = prime_power_decompose(n);
    if (!pp) continue;
    const std::complex<double> lam = lambda_f(spec, n);
    d.logn.push_back(std::log(static_cast<double>(n)));
    d.coeff.push_back(-lam * std::pow(static_cast<double>(n), -sigma));
  }
  // sum_{n>N} g Lambda(n) n^{-sigma} <= 1.04 g N^{1-sigma} sigma/(sigma-1)
  // (psi(x) < 1.04 x and partial summation)
  const double Nd = static_cast<double>(n_trunc);
  d.tail_cert = 1.04 * spec.degree() * std::pow(Nd, 1.0 - sigma) * sigma / (sigma - 1.0);
  return d;
}

}  // namespace mfunc
