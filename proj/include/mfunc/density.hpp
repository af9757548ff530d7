#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mfunc/errors.hpp"
#include "mfunc/fft.hpp"
#include "mfunc/lfunction.hpp"
#include "mfunc/localfactor.hpp"
#include "mfunc/parallel.hpp"
#include "mfunc/primes.hpp"
#include "mfunc/rect.hpp"

namespace mfunc {

//! Samples of the characteristic function M(z) = prod_p M_p(z) on the square
//! lattice z_jk = (-z_max + j dx) + i(-z_max + k dx), dx = 2 z_max / n, with a
//! per-point additive error certificate.  Layout: values[k*n + j], j along x.
struct CharacteristicGrid {
  double sigma = 0;
  double z_max = 0;
  int n = 0;
  std::uint64_t p_max = 0;
  std::vector<std::complex<double>> values;
  std::vector<double> abs_err;
  double tail_cert = 0;     // bound on |log prod_{p>p_max}| over the whole box
  double boundary_max = 0;  // max |value| on the outer frame
  std::string spec_name;

  double dx() const { return 2.0 * z_max / n; }
  double x(int j) const { return -z_max + j * dx(); }
  double y(int k) const { return -z_max + k * dx(); }
  std::size_t idx(int j, int k) const { return static_cast<std::size_t>(k) * n + j; }

  std::complex<double> at0() const { return values[idx(n / 2, n / 2)]; }
  double abs_err_at0() const { return abs_err[idx(n / 2, n / 2)]; }

  double max_abs_err() const {
    double m = 0;
    for (double e : abs_err) m = std::max(m, e);
    return m;
  }
};

struct GridOptions {
  double series_tol = 1e-15;   // per-prime m-truncation (in w-space)
  double quad_tol = 1e-13;     // target for the node-doubling probe
  int max_quad_points = 4096;  // per-prime node cap; reached caps accuracy, not validity
};

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

//! Probe |V_2Q - V_Q| at the worst lattice corners to pick the node count.
inline int choose_quad_points(const LocalSeries& s, double z_max, const GridOptions& opt,
                              double& q_err) {
  int Q = 8;
  while (Q < 4 * s.m_max) Q *= 2;
  const std::complex<double> probes[3] = {{-z_max, -z_max}, {-z_max, 0.0}, {0.0, -z_max}};
  std::vector<double> a, b, a2, b2;
  for (;;) {
    local_series_nodes(s, Q, a, b);
    local_series_nodes(s, 2 * Q, a2, b2);
    double diff = 0;
    for (const auto& z : probes)
      diff = std::max(diff, std::abs(quad_eval(a2, b2, z.real(), z.imag()) -
                                     quad_eval(a, b, z.real(), z.imag())));
    if (diff <= opt.quad_tol || 2 * Q >= opt.max_quad_points) {
      q_err = diff + 8e-16 * Q;
      return 2 * Q;
    }
    Q *= 2;
  }
}

//! exp(-i * x_j * c) for the lattice x_j = -z_max + j dx, via phase stepping
//! with periodic exact re-anchoring.
inline void phase_row(double c, double z_max, double dx, int n, std::complex<double>* out) {
  const std::complex<double> step{std::cos(dx * c), -std::sin(dx * c)};
  std::complex<double> cur;
  for (int j = 0; j < n; ++j) {
    if (j % 64 == 0) {
      const double ph = -(-z_max + j * dx) * c;
      cur = {std::cos(ph), std::sin(ph)};
    }
    out[j] = cur;
    cur *= step;
  }
}

}  // namespace detail

//! Scalar evaluation of the truncated Euler product at one point.
inline LocalFactorValue characteristic_value(const LFunctionSpec& spec, double sigma,
                                             std::complex<double> z, std::uint64_t p_max,
                                             bool include_tail = true,
                                             const GridOptions& opt = {}) {
  if (!(sigma > 0.5)) throw std::domain_error("characteristic_value: requires sigma > 1/2");
  PrimeTable pt(p_max);
  std::complex<double> v{1.0, 0.0};
  double err = 0;
  for (auto p : pt.primes()) {
    const LocalSeries s = local_series(spec, p, sigma, opt.series_tol);
    LocalFactorValue f;
    if (expansion_applicable(s, z)) {
      f = local_factor_expansion(s, z);
    } else {
      double q_err = 0;
      const int Q = detail::choose_quad_points(s, std::max(std::abs(z.real()), std::abs(z.imag())),
                                               opt, q_err);
      f = local_factor_quadrature(s, z, Q / 2);
    }
    err += std::abs(v) * f.abs_error;
    v *= f.value;
  }
  if (include_tail) {
    const double s_here = std::abs(z.real()) + std::abs(z.imag());
    if (s_here > 0) {
      const auto tb = product_tail_bound(spec.degree(), sigma, s_here, p_max);
      err += std::abs(v) * std::min(std::expm1(tb.eval(z.real(), z.imag())), 2.0);
    }
  }
  return {v, err};
}

//! Assembles the Euler product over p <= p_max on the lattice.  Small primes
//! go through quadrature evaluated as rank-one node updates; primes whose
//! expansion is valid across the whole box are collapsed through power sums
//! of their second-moment coefficients.  `tol` caps the admissible per-point
//! error contribution of the omitted tail p > p_max.
inline CharacteristicGrid characteristic_grid(const LFunctionSpec& spec, double sigma,
                                              double z_max, int n, std::uint64_t p_max,
                                              double tol = 1e-3, unsigned threads = 0,
                                              const GridOptions& opt = {}) {
  if (!(sigma > 0.5)) throw std::domain_error("characteristic_grid: requires sigma > 1/2");
  if (!detail::is_pow2(n) || n < 4)
    throw std::invalid_argument("characteristic_grid: n must be a power of two >= 4");
  if (!(z_max > 0)) throw std::invalid_argument("characteristic_grid: z_max must be positive");

  CharacteristicGrid grid;
  grid.sigma = sigma;
  grid.z_max = z_max;
  grid.n = n;
  grid.p_max = p_max;
  grid.spec_name = spec.name();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  grid.values.assign(nn, {1.0, 0.0});
  grid.abs_err.assign(nn, 0.0);
  const double dx = grid.dx();
  const double s_corner = 2.0 * z_max;

  // |z| per lattice point, reused by every prime's error update
  std::vector<double> rnorm(nn);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      rnorm[grid.idx(j, k)] = std::hypot(grid.x(j), grid.y(k));

  PrimeTable pt(p_max);
  std::vector<LocalSeries> quad_series;
  std::vector<LocalSeries> exp_series;
  for (auto p : pt.primes()) {
    LocalSeries s = local_series(spec, p, sigma, opt.series_tol);
    if (s_corner * s.abs_envelope() <= kExpansionThreshold)
      exp_series.push_back(std::move(s));
    else
      quad_series.push_back(std::move(s));
  }

  // --- quadrature primes: factor grid as (1/Q) sum_q u_q(x) v_q(y) ---------
  std::vector<std::complex<double>> U, V, row;
  std::vector<double> a, b;
  for (const auto& s : quad_series) {
    double q_err = 0;
    const int Q = detail::choose_quad_points(s, z_max, opt, q_err);
    detail::local_series_nodes(s, Q, a, b);
    U.resize(static_cast<std::size_t>(Q) * n);
    V.resize(static_cast<std::size_t>(Q) * n);
    for (int q = 0; q < Q; ++q) {
      detail::phase_row(a[q], z_max, dx, n, U.data() + static_cast<std::size_t>(q) * n);
      detail::phase_row(b[q], z_max, dx, n, V.data() + static_cast<std::size_t>(q) * n);
    }
    const double inv_q = 1.0 / Q;
    parallel_chunks(n, 8, threads, [&](std::size_t k0, std::size_t k1, std::size_t) {
      std::vector<std::complex<double>> acc(n);
      for (std::size_t k = k0; k < k1; ++k) {
        std::fill(acc.begin(), acc.end(), std::complex<double>{0.0, 0.0});
        for (int q = 0; q < Q; ++q) {
          const std::complex<double> vk = V[static_cast<std::size_t>(q) * n + k];
          const std::complex<double>* uq = U.data() + static_cast<std::size_t>(q) * n;
          for (int j = 0; j < n; ++j) acc[j] += vk * uq[j];
        }
        const std::size_t base = k * n;
        for (int j = 0; j < n; ++j) {
          const std::size_t i = base + j;
          const double e_p = rnorm[i] * s.tail_bound + q_err;
          grid.abs_err[i] += std::abs(grid.values[i]) * e_p;
          grid.values[i] *= acc[j] * inv_q;
        }
      }
    });
  }

  // --- expansion primes: log prod (1 - mu_p) via power sums ----------------
  if (!exp_series.empty()) {
    double t1 = 0, t2 = 0, t3 = 0, t4 = 0;  // sums of (sq_sum/4)^k
    double c3 = 0;                          // sum of (e/6) envelope^3
    double c2t = 0;                         // sum of sq_tail/4
    double smax4 = 0;                       // max sq_sum/4
    for (const auto& s : exp_series) {
      const double m1 = 0.25 * s.sq_sum;
      t1 += m1;
      t2 += m1 * m1;
      t3 += m1 * m1 * m1;
      t4 += m1 * m1 * m1 * m1;
      const double env = s.abs_envelope();
      c3 += std::numbers::e / 6.0 * env * env * env;
      c2t += 0.25 * s.sq_tail_bound;
      smax4 = std::max(smax4, m1);
    }
    parallel_chunks(n, 16, threads, [&](std::size_t k0, std::size_t k1, std::size_t) {
      for (std::size_t k = k0; k < k1; ++k) {
        const double y = grid.y(static_cast<int>(k));
        for (int j = 0; j < n; ++j) {
          const std::size_t i = k * n + j;
          const double x = grid.x(j);
          const double r2 = x * x + y * y;
          const double sxy = std::abs(x) + std::abs(y);
          const double poly = r2 * t1 + 0.5 * r2 * r2 * t2 + r2 * r2 * r2 * t3 / 3.0 +
                              0.25 * r2 * r2 * r2 * r2 * t4;
          const double factor = std::exp(-poly);
          // log-series truncation past k = 4
          const double u = r2 * smax4;
          const double delta = (t1 > 0 && u < 1.0)
                                   ? r2 * u * u * u * u * t1 / (5.0 * (1.0 - u))
                                   : 0.0;
          const double e_all = sxy * sxy * sxy * c3 + r2 * c2t + delta + 4e-16 * (1.0 + poly);
          grid.abs_err[i] += std::abs(grid.values[i]) * e_all;
          grid.values[i] *= factor;
        }
      }
    });
  }

  // --- tail over p > p_max --------------------------------------------------
  const auto tb = product_tail_bound(spec.degree(), sigma, s_corner, p_max);
  grid.tail_cert = (tb.a2 * s_corner * s_corner + tb.a3 * s_corner * s_corner * s_corner) / tb.denom;
  double max_tail_term = 0;
  for (int k = 0; k < n; ++k) {
    const double y = grid.y(k);
    for (int j = 0; j < n; ++j) {
      const std::size_t i = grid.idx(j, k);
      const double t = std::abs(grid.values[i]) *
                       std::min(std::expm1(tb.eval(grid.x(j), y)), 2.0);
      grid.abs_err[i] += t;
      max_tail_term = std::max(max_tail_term, t);
    }
  }
  if (max_tail_term > tol) {
    std::uint64_t need = p_max;
    for (int it = 0; it < 40 && need < (1ull << 40); ++it) {
      need *= 2;
      try {
        const auto tb2 = product_tail_bound(spec.degree(), sigma, s_corner, need);
        double worst = 0;
        for (std::size_t i = 0; i < nn; ++i) {
          const int j = static_cast<int>(i % n), k = static_cast<int>(i / n);
          worst = std::max(worst, std::abs(grid.values[i]) *
                                      std::min(std::expm1(tb2.eval(grid.x(j), grid.y(k))), 2.0));
        }
        if (worst <= tol) break;
      } catch (const certificate_error&) {
      }
    }
    throw certificate_error("characteristic_grid: tail certificate " + std::to_string(max_tail_term) +
                            " exceeds tol " + std::to_string(tol) + "; required p_max ~ " +
                            std::to_string(need));
  }

  for (int j = 0; j < n; ++j) {
    grid.boundary_max = std::max(grid.boundary_max, std::abs(grid.values[grid.idx(j, 0)]));
    grid.boundary_max = std::max(grid.boundary_max, std::abs(grid.values[grid.idx(j, n - 1)]));
    grid.boundary_max = std::max(grid.boundary_max, std::abs(grid.values[grid.idx(0, j)]));
    grid.boundary_max = std::max(grid.boundary_max, std::abs(grid.values[grid.idx(n - 1, j)]));
  }
  return grid;
}

//! Grid filled from an explicit function (control cases, transform tests).
inline CharacteristicGrid characteristic_grid_from_function(
    const std::function<std::complex<double>(double, double)>& fn, double z_max, int n) {
  if (!detail::is_pow2(n) || n < 4)
    throw std::invalid_argument("characteristic_grid_from_function: n must be a power of two");
  CharacteristicGrid g;
  g.sigma = 0;
  g.z_max = z_max;
  g.n = n;
  g.p_max = 0;
  g.spec_name = "function";
  g.values.resize(static_cast<std::size_t>(n) * n);
  g.abs_err.assign(g.values.size(), 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) g.values[g.idx(j, k)] = fn(g.x(j), g.y(k));
  for (int j = 0; j < n; ++j) {
    g.boundary_max = std::max(g.boundary_max, std::abs(g.values[g.idx(j, 0)]));
    g.boundary_max = std::max(g.boundary_max, std::abs(g.values[g.idx(j, n - 1)]));
    g.boundary_max = std::max(g.boundary_max, std::abs(g.values[g.idx(0, j)]));
    g.boundary_max = std::max(g.boundary_max, std::abs(g.values[g.idx(n - 1, j)]));
  }
  return g;
}

//! Real density samples on the dual lattice, measure |dz| = (2 pi)^-1 dxdy.
struct DensityGrid {
  double sigma = 0;
  double w_max = 0;  // half-width of the density lattice
  int n = 0;
  std::vector<double> values;  // row-major [m*n + l], l along x
  double cell_measure = 0;     // dx*dy / (2 pi)
  double eps_mass = 0;         // |sum * cell_measure - 1|
  double eps_ring = 0;         // magnitude of the most negative sample
  double imag_residue = 0;     // max |Im| discarded after inversion
  double inversion_err = 0;    // pointwise bound inherited from input certificates
  std::string spec_name;

  double dx() const { return 2.0 * w_max / n; }
  double x(int l) const { return -w_max + l * dx(); }
  double y(int m) const { return -w_max + m * dx(); }
  std::size_t idx(int l, int m) const { return static_cast<std::size_t>(m) * n + l; }
  double mass() const {
    double s = 0;
    for (double v : values) s += v;
    return s * cell_measure;
  }
};

//! Discrete Fourier inversion of the characteristic grid.  Fails when the
//! input has not decayed below boundary_tol at the edge of the box (aliasing
//! would corrupt the density).
inline DensityGrid invert_to_density(const CharacteristicGrid& grid, double boundary_tol = 1e-8,
                                     unsigned threads = 0) {
  if (grid.boundary_max > boundary_tol)
    throw certificate_error("invert_to_density: boundary decay check failed (max |M| = " +
                            std::to_string(grid.boundary_max) + " > " +
                            std::to_string(boundary_tol) + "); enlarge z_max or n");
  const int n = grid.n;
  const std::size_t nn = grid.values.size();
  const double dw = grid.dx();

  std::vector<std::complex<double>> work(nn);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      work[grid.idx(j, k)] = ((j + k) % 2 == 0 ? 1.0 : -1.0) * grid.values[grid.idx(j, k)];
  fft2_inplace(work, n, /*inverse=*/false, threads);

  DensityGrid d;
  d.sigma = grid.sigma;
  d.n = n;
  d.w_max = std::numbers::pi * n / (2.0 * grid.z_max);
  d.spec_name = grid.spec_name;
  const double scale = dw * dw / (2.0 * std::numbers::pi);
  d.cell_measure = d.dx() * d.dx() / (2.0 * std::numbers::pi);
  d.values.resize(nn);
  double imag_max = 0, vmin = 0;
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) {
      const std::size_t i = d.idx(l, m);
      const std::complex<double> v = ((l + m) % 2 == 0 ? 1.0 : -1.0) * scale * work[i];
      imag_max = std::max(imag_max, std::abs(v.imag()));
      d.values[i] = v.real();
      vmin = std::min(vmin, v.real());
    }
  d.imag_residue = imag_max;
  d.eps_ring = -vmin;
  d.eps_mass = std::abs(d.mass() - 1.0);

  double err_sum = 0;
  for (double e : grid.abs_err) err_sum += e;
  double abs_sum = 0;
  for (const auto& v : grid.values) abs_sum += std::abs(v);
  // FFT roundoff on top of the input certificates
  d.inversion_err = scale * (err_sum + 1e-15 * std::log2(static_cast<double>(n)) * abs_sum);
  return d;
}

//! Integral of the (nonnegative-clipped) bilinear interpolant over R, with
//! measure (2 pi)^-1 dxdy.
inline double rectangle_mass(const DensityGrid& d, const Rect& R) {
  const int n = d.n;
  const double lo_x = d.x(0), hi_x = d.x(n - 1), lo_y = d.y(0), hi_y = d.y(n - 1);
  if (R.x0 < lo_x || R.x1 > hi_x || R.y0 < lo_y || R.y1 > hi_y)
    throw std::invalid_argument("rectangle_mass: rectangle exceeds grid extent");
  if (R.x0 == R.x1 || R.y0 == R.y1) return 0.0;
  const double h = d.dx();
  const auto clip0 = [&](int l, int m) { return std::max(0.0, d.values[d.idx(l, m)]); };

  const int l0 = static_cast<int>(std::floor((R.x0 - lo_x) / h));
  const int l1 = std::min(n - 2, static_cast<int>(std::floor((R.x1 - lo_x) / h)));
  const int m0 = static_cast<int>(std::floor((R.y0 - lo_y) / h));
  const int m1 = std::min(n - 2, static_cast<int>(std::floor((R.y1 - lo_y) / h)));

  double total = 0;
  for (int m = m0; m <= m1; ++m) {
    const double cy0 = d.y(m), cy1 = d.y(m + 1);
    const double t0 = std::max(0.0, (R.y0 - cy0) / h);
    const double t1 = std::min(1.0, (R.y1 - cy0) / h);
    if (t1 <= t0) continue;
    const double it1 = (t1 - t0) - 0.5 * (t1 * t1 - t0 * t0);  // int (1-t)
    const double it2 = 0.5 * (t1 * t1 - t0 * t0);              // int t
    for (int l = l0; l <= l1; ++l) {
      const double cx0 = d.x(l);
      const double s0 = std::max(0.0, (R.x0 - cx0) / h);
      const double s1 = std::min(1.0, (R.x1 - cx0) / h);
      if (s1 <= s0) continue;
      const double is1 = (s1 - s0) - 0.5 * (s1 * s1 - s0 * s0);
      const double is2 = 0.5 * (s1 * s1 - s0 * s0);
      const double f00 = clip0(l, m), f10 = clip0(l + 1, m);
      const double f01 = clip0(l, m + 1), f11 = clip0(l + 1, m + 1);
      total += h * h * (f00 * is1 * it1 + f10 * is2 * it1 + f01 * is1 * it2 + f11 * is2 * it2);
    }
  }
  return std::max(0.0, total / (2.0 * std::numbers::pi));
}

//! Marginal in x with 1D measure (2 pi)^-1/2 dy per axis, so that the two
//! axis measures compose to |dz|.
inline std::vector<double> marginal_x(const DensityGrid& d) {
  std::vector<double> m(d.n, 0.0);
  for (int l = 0; l < d.n; ++l) {
    double s = 0;
    for (int k = 0; k < d.n; ++k) s += d.values[d.idx(l, k)];
    m[l] = s * d.dx() / std::sqrt(2.0 * std::numbers::pi);
  }
  return m;
}

struct DecayFit {
  double c = 0;             // fitted rate against the predictor
  double log_amplitude = 0; // fitted intercept
  double rms_residual = 0;
  int points = 0;
};

//! Least squares of log|v| = log_amplitude - c * t(x).
inline DecayFit fit_decay(const std::vector<double>& xs, const std::vector<double>& logv,
                          const std::function<double(double)>& predictor) {
  DecayFit f;
  const std::size_t m = xs.size();
  if (m != logv.size() || m < 2) throw std::invalid_argument("fit_decay: need >= 2 points");
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::vector<double> ts(m);
  for (std::size_t i = 0; i < m; ++i) {
    ts[i] = predictor(xs[i]);
    st += ts[i];
    sy += logv[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * logv[i];
  }
  const double det = m * stt - st * st;
  const double slope = (m * sty - st * sy) / det;
  f.c = -slope;
  f.log_amplitude = (sy - slope * st) / m;
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = logv[i] - (f.log_amplitude + slope * ts[i]);
    rss += r * r;
  }
  f.rms_residual = std::sqrt(rss / m);
  f.points = static_cast<int>(m);
  return f;
}

//! Fits log |M(x,0)| against -(x)^(1/sigma) (log x)^(1/sigma - 1) over
//! x in [k_fit, z_max], the decay shape predicted for the product.
inline DecayFit decay_diagnostic(const CharacteristicGrid& grid, double k_fit = 10.0) {
  const int n = grid.n;
  std::vector<double> xs, lv;
  for (int j = n / 2; j < n; ++j) {
    const double x = grid.x(j);
    if (x < k_fit) continue;
    const double a = std::abs(grid.values[grid.idx(j, n / 2)]);
    if (a < 1e-290 || !std::isfinite(a)) continue;
    xs.push_back(x);
    lv.push_back(std::log(a));
  }
  if (xs.size() < 8)
    throw std::invalid_argument("decay_diagnostic: fewer than 8 samples beyond k_fit");
  const double inv_sigma = grid.sigma > 0 ? 1.0 / grid.sigma : 1.0;
  return fit_decay(xs, lv, [inv_sigma](double x) {
    return std::pow(x, inv_sigma) * std::pow(std::log(x), inv_sigma - 1.0);
  });
}

}  // namespace mfunc
