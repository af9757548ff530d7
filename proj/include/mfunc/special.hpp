#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mfunc {

namespace detail {

// Complex continued fraction for E1(ix) via the modified Lentz algorithm
// (the standard route to Si/Ci away from the origin).
inline std::complex<double> e1_of_ix(double x) {
  const std::complex<double> z(0.0, x);
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int k = 1; k < 200; ++k) {
    const double a = -static_cast<double>(k) * k;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return h * std::exp(-z);
}

}  // namespace detail

//! Sine integral Si(x) = int_0^x sin(t)/t dt.
inline double sine_integral(double x) {
  const double ax = std::abs(x);
  double si;
  if (ax <= 4.0) {
    // Taylor series: sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    const double x2 = ax * ax;
    double term = ax;
    si = ax;
    for (int k = 1; k < 40; ++k) {
      term *= -x2 / (2.0 * k * (2.0 * k + 1.0));
      si += term / (2.0 * k + 1.0);
      if (std::abs(term) < 1e-18 * std::abs(si)) break;
    }
  } else {
    si = std::numbers::pi / 2 + std::imag(detail::e1_of_ix(ax));
  }
  return x < 0 ? -si : si;
}

namespace detail {

// Euler-Maclaurin tail coefficients B_{2j}/(2j)! for j = 1..6.
inline constexpr double kEmCoef[6] = {
    1.0 / 12.0,        -1.0 / 720.0,      1.0 / 30240.0,
    -1.0 / 1209600.0,  1.0 / 47900160.0,  -691.0 / 1307674368000.0};

}  // namespace detail

//! Riemann zeta on the real axis, s > 1 (Euler-Maclaurin).
inline double zeta_real(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta_real: requires s > 1");
  const int M = 24;
  double sum = 0.0;
  for (int n = 1; n < M; ++n) sum += std::pow(n, -s);
  const double Ms = std::pow(M, -s);
  sum += Ms * M / (s - 1.0) + 0.5 * Ms;
  // Correction terms B_2j/(2j)! * M^(-s-2j+1) * prod_{i=0}^{2j-2} (s+i)
  double poly = s;             // running product of (s+i)
  double mpow = Ms / M;        // M^(-s-2j+1), starting at j = 1
  for (int j = 1; j <= 6; ++j) {
    sum += detail::kEmCoef[j - 1] * poly * mpow;
    poly *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    mpow /= static_cast<double>(M) * M;
  }
  return sum;
}

//! Adaptive Simpson quadrature with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int depth = 24) {
  auto simpson = [&](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  struct Rec {
    double a, b, whole, tol;
    int depth;
  };
  double total = 0.0;
  std::vector<Rec> stack{{a, b, simpson(a, b), tol, depth}};
  while (!stack.empty()) {
    Rec r = stack.back();
    stack.pop_back();
    const double m = 0.5 * (r.a + r.b);
    const double left = simpson(r.a, m), right = simpson(m, r.b);
    const double err = left + right - r.whole;
    if (std::abs(err) <= 15.0 * r.tol || r.depth <= 0) {
      total += left + right + err / 15.0;
    } else {
      stack.push_back({r.a, m, left, 0.5 * r.tol, r.depth - 1});
      stack.push_back({m, r.b, right, 0.5 * r.tol, r.depth - 1});
    }
  }
  return total;
}

//! d/ds of zeta_real (negative for real s > 1).
inline double zeta_prime_real(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta_prime_real: requires s > 1");
  const int M = 24;
  const double lm = std::log(static_cast<double>(M));
  double sum = 0.0;
  for (int n = 2; n < M; ++n) sum -= std::log(static_cast<double>(n)) * std::pow(n, -s);
  const double Ms = std::pow(M, -s);
  sum += -lm * Ms * M / (s - 1.0) - Ms * M / ((s - 1.0) * (s - 1.0)) - 0.5 * lm * Ms;
  double poly = s;
  double dpoly = 1.0;          // derivative of the running product
  double mpow = Ms / M;
  for (int j = 1; j <= 6; ++j) {
    sum += detail::kEmCoef[j - 1] * mpow * (dpoly - lm * poly);
    const double a = s + 2.0 * j - 1.0, b = s + 2.0 * j;
    dpoly = dpoly * a * b + poly * (a + b);
    poly *= a * b;
    mpow /= static_cast<double>(M) * M;
  }
  return sum;
}

}  // namespace mfunc
