#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "mfunc/special.hpp"

// Test functions in the class of integrable functions with integrable
// transform: Gaussians and band-limited approximations to box indicators
// built from the Fejer kernel.  Conventions: the 2D plane transform uses
// psi_z(w) = exp(i Re(z conj w)) with |dw| = (2 pi)^-1 du dv; each 1D axis
// uses e^{ixu} with |du| = (2 pi)^-1/2 du, so the axis transforms compose to
// the plane transform.

namespace mfunc {

//! Fejer kernel (sin pi x / pi x)^2 with the removable singularity at 0.
inline double fejer_kernel(double x) {
  const double t = std::numbers::pi * x;
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 3.0;
  const double s = std::sin(t) / t;
  return s * s;
}

//! Antiderivative int_0^x K(u) du = Si(2 pi x)/pi + (cos(2 pi x) - 1)/(2 pi^2 x).
inline double fejer_kernel_antiderivative(double x) {
  if (std::abs(x) < 1e-8) return x - std::pow(std::numbers::pi * x, 2) * x / 9.0;
  const double tp = 2.0 * std::numbers::pi * x;
  return sine_integral(tp) / std::numbers::pi +
         (std::cos(tp) - 1.0) / (2.0 * std::numbers::pi * std::numbers::pi * x);
}

//! Band-limited approximation to the indicator of [a, b]: the indicator
//! convolved with s K(s u), s = omega / (2 pi).  With this scale the
//! transform is the indicator transform times the triangle (1 - |x|/omega)+,
//! so it vanishes for |x| >= omega.
class BoxFejer1D {
public:
  BoxFejer1D(double a, double b, double omega) : a_(a), b_(b), omega_(omega) {
    if (!(a < b)) throw std::invalid_argument("BoxFejer1D: requires a < b");
    if (!(omega > 0)) throw std::invalid_argument("BoxFejer1D: requires omega > 0");
    s_ = omega / (2.0 * std::numbers::pi);
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double omega() const { return omega_; }

  double operator()(double x) const {
    return fejer_kernel_antiderivative(s_ * (x - a_)) -
           fejer_kernel_antiderivative(s_ * (x - b_));
  }

  //! (2 pi)^-1/2 int F(u) e^{ixu} du.
  std::complex<double> transform(double x) const {
    const double tri = 1.0 - std::abs(x) / omega_;
    if (tri <= 0.0) return {0.0, 0.0};
    return indicator_transform(x) * tri;
  }

  //! Transform of the sharp indicator of [a, b] under the same convention.
  std::complex<double> indicator_transform(double x) const {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    if (std::abs(x) < 1e-12) {
      // (e^{ixb} - e^{ixa})/(ix) -> (b-a) + i x (b^2-a^2)/2
      return norm * std::complex<double>{b_ - a_, 0.5 * x * (b_ * b_ - a_ * a_)};
    }
    const std::complex<double> eb{std::cos(x * b_), std::sin(x * b_)};
    const std::complex<double> ea{std::cos(x * a_), std::sin(x * a_)};
    return norm * (eb - ea) / std::complex<double>{0.0, x};
  }

private:
  double a_, b_, omega_, s_;
};

//! A test function Phi on the plane together with its transform.
class TestFunction {
public:
  enum class Kind { gaussian, box_fejer };

  double operator()(std::complex<double> z) const { return value_(z.real(), z.imag()); }
  std::complex<double> transform(std::complex<double> z) const {
    return transform_(z.real(), z.imag());
  }

  Kind kind() const { return kind_; }
  //! Half-widths of the box outside which the transform vanishes
  //! (infinity for Gaussians).
  double support_x() const { return support_x_; }
  double support_y() const { return support_y_; }
  std::string describe() const { return describe_; }

  static TestFunction gaussian(double s) {
    if (!(s > 0)) throw std::invalid_argument("TestFunction::gaussian: s must be positive");
    TestFunction t;
    t.kind_ = Kind::gaussian;
    t.value_ = [s](double x, double y) { return std::exp(-(x * x + y * y) / (2.0 * s * s)); };
    t.transform_ = [s](double x, double y) {
      return std::complex<double>{s * s * std::exp(-s * s * (x * x + y * y) / 2.0), 0.0};
    };
    t.support_x_ = t.support_y_ = std::numeric_limits<double>::infinity();
    t.describe_ = "gaussian(s=" + std::to_string(s) + ")";
    return t;
  }

  static TestFunction product(const BoxFejer1D& fx, const BoxFejer1D& fy) {
    TestFunction t;
    t.kind_ = Kind::box_fejer;
    t.value_ = [fx, fy](double x, double y) { return fx(x) * fy(y); };
    t.transform_ = [fx, fy](double x, double y) { return fx.transform(x) * fy.transform(y); };
    t.support_x_ = fx.omega();
    t.support_y_ = fy.omega();
    t.describe_ = "box_fejer";
    return t;
  }

private:
  Kind kind_ = Kind::gaussian;
  std::function<double(double, double)> value_;
  std::function<std::complex<double>(double, double)> transform_;
  double support_x_ = 0, support_y_ = 0;
  std::string describe_;
};

inline TestFunction gaussian_phi(double s) { return TestFunction::gaussian(s); }

inline BoxFejer1D box_fejer_1d(double a, double b, double omega) { return {a, b, omega}; }

inline TestFunction product_phi(const BoxFejer1D& fx, const BoxFejer1D& fy) {
  return TestFunction::product(fx, fy);
}

//! Numeric evaluation of (2/omega^2) int_0^omega (omega - u) cos(2 pi x u) du,
//! which reproduces K(omega x); used as a self-test on the kernel identity.
inline double kernel_average_identity(double omega, double x, double tol = 1e-12) {
  if (!(omega > 0)) throw std::invalid_argument("kernel_average_identity: omega must be positive");
  const double val = adaptive_simpson(
      [omega, x](double u) {
        return (omega - u) * std::cos(2.0 * std::numbers::pi * x * u);
      },
      0.0, omega, tol);
  return 2.0 / (omega * omega) * val;
}

}  // namespace mfunc
