#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mfunc/errors.hpp"
#include "mfunc/lfunction.hpp"

// Per-prime local factor of the characteristic function of the value
// distribution of F'/F on a vertical line:
//
//   M_p(z) = int_0^1 psi_z( -sum_{m>=1} Lambda_F(p^m) p^{-m sigma} e^{2 pi i m theta} ) dtheta,
//
// with psi_z(w) = exp(i Re(z conj(w))).  The minus sign keeps the factor
// equal to the characteristic function of the sampled model for F'/F itself
// (the logarithmic derivative is minus the Lambda_F Dirichlet series), so
// empirical clouds and analytic products are comparable without reflection.

namespace mfunc {

//! Truncated local prime-power series with tail certificates.
struct LocalSeries {
  std::uint64_t p = 0;
  double sigma = 0;
  int g = 0;
  double log_p = 0;
  int m_max = 0;
  std::vector<std::complex<double>> coeffs;  // c_m = Lambda_F(p^m) p^{-m sigma}, m = 1..m_max
  double tail_bound = 0;      // >= sum_{m>m_max} g log p * p^{-m sigma}
  double coeff_abs_sum = 0;   // sum_m |c_m|
  double sq_sum = 0;          // sum_m |c_m|^2
  double sq_tail_bound = 0;   // >= sum_{m>m_max} (g log p)^2 p^{-2 m sigma}

  //! sup_theta of |Re w| and |Im w| including the truncated tail.
  double abs_envelope() const { return coeff_abs_sum + tail_bound; }
};

//! Builds the local series at p with the smallest m_max whose geometric tail
//! bound g log p * p^{-(m_max+1) sigma} / (1 - p^{-sigma}) is at most tol.
inline LocalSeries local_series(const LFunctionSpec& spec, std::uint64_t p, double sigma,
                                double tol) {
  if (!(sigma > 0.5)) throw std::domain_error("local_series: requires sigma > 1/2");
  if (!(tol > 0)) throw std::invalid_argument("local_series: tol must be positive");
  LocalSeries s;
  s.p = p;
  s.sigma = sigma;
  s.g = spec.degree();
  s.log_p = std::log(static_cast<double>(p));
  const double r = std::pow(static_cast<double>(p), -sigma);
  const double glp = s.g * s.log_p;
  // minimal m >= 1 with glp * r^(m+1) / (1-r) <= tol
  double tail = glp * r * r / (1.0 - r);
  int m = 1;
  while (tail > tol) {
    tail *= r;
    ++m;
    if (m > 200000) throw std::invalid_argument("local_series: tol unattainably small");
  }
  s.m_max = m;
  s.tail_bound = tail;

  const auto roots = spec.local_roots(p);
  std::vector<std::complex<double>> pw(roots.begin(), roots.end());
  double pm = r;
  s.coeffs.reserve(m);
  for (int k = 1; k <= m; ++k) {
    std::complex<double> lam{0.0, 0.0};
    for (auto& w : pw) lam += w;
    const std::complex<double> c = lam * s.log_p * pm;
    s.coeffs.push_back(c);
    s.coeff_abs_sum += std::abs(c);
    s.sq_sum += std::norm(c);
    for (std::size_t j = 0; j < pw.size(); ++j) pw[j] *= roots[j];
    pm *= r;
  }
  // sum_{m>m_max} (g logp)^2 p^{-2m sigma} = (g logp)^2 r^{2(m+1)} / (1-r^2)
  s.sq_tail_bound = glp * glp * std::pow(r, 2.0 * (m + 1)) / (1.0 - r * r);
  return s;
}

struct LocalFactorValue {
  std::complex<double> value;
  double abs_error = 0;
};

namespace detail {

//! Quadrature-node images (a_q, b_q) = (Re, Im) of the local series at
//! theta = q/Q, q = 0..Q-1.
inline void local_series_nodes(const LocalSeries& s, int Q, std::vector<double>& a,
                               std::vector<double>& b) {
  a.assign(Q, 0.0);
  b.assign(Q, 0.0);
  for (int q = 0; q < Q; ++q) {
    const double th = 2.0 * std::numbers::pi * q / Q;
    const std::complex<double> e1{std::cos(th), std::sin(th)};
    std::complex<double> em = e1;
    std::complex<double> w{0.0, 0.0};
    for (const auto& c : s.coeffs) {
      w += c * em;
      em *= e1;
    }
    a[q] = w.real();
    b[q] = w.imag();
  }
}

inline std::complex<double> quad_eval(const std::vector<double>& a, const std::vector<double>& b,
                                      double x, double y) {
  std::complex<double> acc{0.0, 0.0};
  const std::size_t Q = a.size();
  for (std::size_t q = 0; q < Q; ++q) {
    const double ph = -(x * a[q] + y * b[q]);
    acc += std::complex<double>{std::cos(ph), std::sin(ph)};
  }
  return acc / static_cast<double>(Q);
}

}  // namespace detail

//! Equispaced trapezoid rule on [0,1] (exact for trigonometric polynomials of
//! degree below the node count).  The reported error combines the doubled-
//! node difference with |z| times the series tail certificate.
inline LocalFactorValue local_factor_quadrature(const LocalSeries& s, std::complex<double> z,
                                                int quad_points) {
  if (quad_points < 4 * s.m_max)
    throw std::invalid_argument("local_factor_quadrature: need quad_points >= 4*m_max");
  std::vector<double> a, b;
  detail::local_series_nodes(s, quad_points, a, b);
  const std::complex<double> v1 = detail::quad_eval(a, b, z.real(), z.imag());
  detail::local_series_nodes(s, 2 * quad_points, a, b);
  const std::complex<double> v2 = detail::quad_eval(a, b, z.real(), z.imag());
  LocalFactorValue out;
  out.value = v2;
  out.abs_error = std::abs(v2 - v1) + std::abs(z) * s.tail_bound + 8e-16 * quad_points;
  return out;
}

//! Second-order coefficient of the local expansion, restricted to real z:
//! mu_p = ((x^2+y^2)/4) sum_{m<=m_max} |Lambda_F(p^m)|^2 p^{-2m sigma}.
inline double mu_p(const LocalSeries& s, std::complex<double> z) {
  return 0.25 * std::norm(z) * s.sq_sum;
}

//! Certified remainder of mu_p from the m-truncation.
inline double mu_tail_bound(const LocalSeries& s, std::complex<double> z) {
  return 0.25 * std::norm(z) * s.sq_tail_bound;
}

//! Smallness gauge for the expansion: (|x|+|y|) * sup_theta |w(theta)|.
inline double expansion_gauge(const LocalSeries& s, std::complex<double> z) {
  return (std::abs(z.real()) + std::abs(z.imag())) * s.abs_envelope();
}

inline constexpr double kExpansionThreshold = 0.1;

inline bool expansion_applicable(const LocalSeries& s, std::complex<double> z) {
  return expansion_gauge(s, z) <= kExpansionThreshold;
}

//! Cubic remainder bound with explicit constant: the expansion drops
//! sum_{k>=3} (i^k/k!) (x a + y b)^k whose modulus is at most
//! e^M - 1 - M - M^2/2 <= (e/6) M^3 for M = (|x|+|y|) sup|w| <= 1.
inline double expansion_remainder_bound(const LocalSeries& s, std::complex<double> z) {
  const double M = expansion_gauge(s, z);
  return std::numbers::e / 6.0 * M * M * M;
}

//! Fast path 1 - mu_p, valid under the smallness precondition.
inline LocalFactorValue local_factor_expansion(const LocalSeries& s, std::complex<double> z) {
  if (!expansion_applicable(s, z))
    throw expansion_inapplicable("local_factor_expansion: smallness precondition fails at p = " +
                                 std::to_string(s.p));
  LocalFactorValue out;
  out.value = 1.0 - mu_p(s, z);
  if (z == std::complex<double>{0.0, 0.0}) return out;  // exact
  // the 5e-15 floor covers double rounding in either evaluation route
  out.abs_error = expansion_remainder_bound(s, z) + mu_tail_bound(s, z) + 5e-15;
  return out;
}

// ---------------------------------------------------------------------------
// Tail of the Euler product over p > P.
// ---------------------------------------------------------------------------

//! Pointwise bound on |log prod_{p>P} M_p(x+iy)|, valid for |x|+|y| <= s_max:
//!   eval(x,y) = (a2 (x^2+y^2) + a3 (|x|+|y|)^3) / denom.
struct ProductTailBound {
  double a2 = 0;
  double a3 = 0;
  double denom = 1;
  double u_at_P = 0;  // smallness gauge of the first omitted prime scale
  double s_max = 0;

  double eval(double x, double y) const {
    const double s = std::abs(x) + std::abs(y);
    return (a2 * (x * x + y * y) + a3 * s * s * s) / denom;
  }
};

namespace detail {

//! Upper bound for sum_{p>P} (log p)^2 p^{-2 sigma} via partial summation
//! against Chebyshev's theta with theta(x) < 1.02 x (Rosser-Schoenfeld):
//!   <= 1.02 [ logP * P^{1-2sigma} + int_P^inf logt * t^{-2sigma} dt ].
inline double prime_log_sq_sum_bound(double sigma, double P) {
  const double a = 2.0 * sigma;
  const double lp = std::log(P);
  const double integral = std::pow(P, 1.0 - a) * (lp / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)));
  return 1.02 * (lp * std::pow(P, 1.0 - a) + integral);
}

}  // namespace detail

//! Bound machinery shared by tail_log_bound and the grid assembler.
//! Requires sigma > 1/2 and the expansion smallness at scale (s_max, P).
inline ProductTailBound product_tail_bound(int g, double sigma, double s_max, std::uint64_t P) {
  if (!(sigma > 0.5)) throw std::domain_error("product_tail_bound: requires sigma > 1/2");
  if (P < 11) throw std::invalid_argument("product_tail_bound: P too small");
  const double Pd = static_cast<double>(P);
  const double lP = std::log(Pd);
  if (sigma * lP < 1.0)
    throw std::invalid_argument("product_tail_bound: need sigma * log P >= 1");

  const double corr1 = 1.0 / (1.0 - std::pow(Pd, -sigma));
  const double corr2 = 1.0 / (1.0 - std::pow(Pd, -2.0 * sigma));
  const double s2 = detail::prime_log_sq_sum_bound(sigma, Pd);

  ProductTailBound b;
  b.s_max = s_max;
  // mu part: sum_p (x^2+y^2)/4 * (g logp)^2 p^{-2sigma} / (1 - p^{-2sigma})
  b.a2 = 0.25 * g * g * corr2 * s2;
  // cubic part: (e/6) s^3 * sum_p (g logp p^{-sigma} corr1)^3, with
  // (logp)^3 p^{-3sigma} <= (logP P^{-sigma}) (logp)^2 p^{-2sigma} for p >= P
  // (t -> logt * t^{-sigma} decreases once sigma*logt >= 1).
  b.a3 = std::numbers::e / 6.0 * g * g * g * corr1 * corr1 * corr1 * lP * std::pow(Pd, -sigma) * s2;

  // per-prime smallness at the tail start, evaluated at the worst admitted z
  const double envP = g * lP * std::pow(Pd, -sigma) * corr1;
  const double muP = 0.25 * s_max * s_max * g * g * lP * lP * std::pow(Pd, -2.0 * sigma) * corr2;
  const double rP = std::numbers::e / 6.0 * std::pow(s_max * envP, 3.0);
  b.u_at_P = muP + rP;
  if (!(b.u_at_P <= 0.5))
    throw certificate_error("product_tail_bound: expansion not valid for |x|+|y| <= " +
                            std::to_string(s_max) + " beyond P = " + std::to_string(P));
  // |log(1-w)| <= |w| / (1 - u) for |w| <= u
  b.denom = 1.0 - b.u_at_P;
  return b;
}

//! Scalar certificate B >= |log prod_{p>P} M_p(z)| for all |x|+|y| <= z_max.
inline double tail_log_bound(const LFunctionSpec& spec, double sigma, double z_max,
                             std::uint64_t P) {
  if (z_max == 0.0) return 0.0;
  const auto b = product_tail_bound(spec.degree(), sigma, z_max, P);
  // max of x^2+y^2 over |x|+|y| <= z_max is z_max^2
  return (b.a2 * z_max * z_max + b.a3 * z_max * z_max * z_max) / b.denom;
}

}  // namespace mfunc
