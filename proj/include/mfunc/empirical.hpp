#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mfunc/approximant.hpp"
#include "mfunc/parallel.hpp"
#include "mfunc/rect.hpp"
#include "mfunc/rng.hpp"

namespace mfunc {

enum class CloudSource { t_line, random_model, t_line_direct };

inline const char* to_string(CloudSource s) {
  switch (s) {
    case CloudSource::t_line: return "t-line";
    case CloudSource::random_model: return "random-model";
    case CloudSource::t_line_direct: return "t-line-direct";
  }
  return "?";
}

//! Empirical sample of values modelling F'/F on a vertical line.
struct SampleCloud {
  std::vector<std::complex<double>> points;
  CloudSource source = CloudSource::t_line;
  std::string spec_name;
  double sigma = 0;
  double X = 0;     // Dirichlet polynomial cutoff (when applicable)
  double T = 0;     // t-line length (when applicable)
  std::uint64_t seed = 0;
  double trunc_cert = 0;  // inner-series truncation certificate (w-space)
};

//! Midpoint sampling of the time average: t_j = (j + 1/2) T / num_samples.
inline SampleCloud sample_t_line(const ApproximantConfig& cfg, double T,
                                 std::size_t num_samples, unsigned threads = 0) {
  if (num_samples < 1000)
    throw std::invalid_argument("sample_t_line: need at least 10^3 samples");
  if (!(T > 0)) throw std::invalid_argument("sample_t_line: T must be positive");
  Approximant approx(cfg);
  SampleCloud cloud;
  cloud.source = CloudSource::t_line;
  cloud.spec_name = cfg.spec.name();
  cloud.sigma = cfg.sigma;
  cloud.X = cfg.X;
  cloud.T = T;
  cloud.trunc_cert = approx.tail_cert();
  const double dt = T / static_cast<double>(num_samples);
  cloud.points = approx.evaluate_progression(0.5 * dt, dt, num_samples, threads);
  return cloud;
}

//! Same time average through the direct truncated Dirichlet series
//! (sigma > 1 cross-check variant).
inline SampleCloud sample_t_line_direct(const LFunctionSpec& spec, double sigma,
                                        std::uint64_t n_trunc, double T,
                                        std::size_t num_samples, unsigned threads = 0) {
  if (num_samples < 1000)
    throw std::invalid_argument("sample_t_line_direct: need at least 10^3 samples");
  const DirectSeries d = direct_series(spec, sigma, n_trunc);
  SampleCloud cloud;
  cloud.source = CloudSource::t_line_direct;
  cloud.spec_name = spec.name();
  cloud.sigma = sigma;
  cloud.X = std::sqrt(static_cast<double>(n_trunc));
  cloud.T = T;
  cloud.trunc_cert = d.tail_cert;
  cloud.points.assign(num_samples, {0.0, 0.0});
  const double dt = T / static_cast<double>(num_samples);
  parallel_chunks(num_samples, 2048, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t j = b; j < e; ++j) {
      const double t = (static_cast<double>(j) + 0.5) * dt;
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t i = 0; i < d.logn.size(); ++i) {
        const double ph = -t * d.logn[i];
        acc += d.coeff[i] * std::complex<double>{std::cos(ph), std::sin(ph)};
      }
      cloud.points[j] = acc;
    }
  });
  return cloud;
}

//! Random Euler product model: independent uniform phases theta_p per prime,
//! sample = -sum_{p<=X^2} sum_m Lambda_F(p^m) p^{-m sigma} e^{2 pi i m theta_p}.
//! Phase draws are keyed by (seed, prime index, sample index), so clouds are
//! bit-identical for any thread count.
inline SampleCloud sample_random_model(const LFunctionSpec& spec, double sigma, double X,
                                       std::uint64_t count, std::uint64_t seed,
                                       unsigned threads = 0, double series_tol_total = 1e-9) {
  if (!(sigma > 0.5)) throw std::domain_error("sample_random_model: requires sigma > 1/2");
  if (!(X > 1.0)) throw std::invalid_argument("sample_random_model: X must exceed 1");
  SampleCloud cloud;
  cloud.source = CloudSource::random_model;
  cloud.spec_name = spec.name();
  cloud.sigma = sigma;
  cloud.X = X;
  cloud.seed = seed;

  PrimeTable pt(static_cast<std::uint64_t>(X * X));
  const std::size_t np = pt.primes().size();
  std::vector<LocalSeries> series;
  series.reserve(np);
  const double per_prime = series_tol_total / std::max<std::size_t>(1, np);
  for (auto p : pt.primes()) {
    series.push_back(local_series(spec, p, sigma, per_prime));
    cloud.trunc_cert += series.back().tail_bound;
  }

  cloud.points.assign(count, {0.0, 0.0});
  const CounterRng rng(seed);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  parallel_chunks(count, 4096, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t j = b; j < e; ++j) {
      std::complex<double> w{0.0, 0.0};
      for (std::size_t i = 0; i < np; ++i) {
        const double theta = rng.unit(i, j);
        const double ph = kTwoPi * theta;
        const std::complex<double> e1{std::cos(ph), std::sin(ph)};
        std::complex<double> em = e1;
        for (const auto& c : series[i].coeffs) {
          w += c * em;
          em *= e1;
        }
      }
      cloud.points[j] = -w;
    }
  });
  return cloud;
}

//! Mean of psi_z over the cloud (empirical characteristic function).
inline std::complex<double> empirical_char(const SampleCloud& cloud, std::complex<double> z) {
  if (cloud.points.empty()) throw std::invalid_argument("empirical_char: empty cloud");
  const double x = z.real(), y = z.imag();
  // fixed-order pairwise reduction over 4096-sample blocks
  std::vector<std::complex<double>> partial;
  partial.reserve(cloud.points.size() / 4096 + 1);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t j = 0; j < cloud.points.size(); ++j) {
    const auto& w = cloud.points[j];
    const double ph = x * w.real() + y * w.imag();
    acc += std::complex<double>{std::cos(ph), std::sin(ph)};
    if ((j + 1) % 4096 == 0) {
      partial.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  partial.push_back(acc);
  return pairwise_sum(partial) / static_cast<double>(cloud.points.size());
}

//! Standard error of the empirical characteristic function at z (per-sample
//! scatter of psi_z about its mean, over sqrt(count)).
inline double empirical_char_stderr(const SampleCloud& cloud, std::complex<double> z) {
  if (cloud.points.empty()) throw std::invalid_argument("empirical_char_stderr: empty cloud");
  const std::complex<double> mean = empirical_char(cloud, z);
  const double x = z.real(), y = z.imag();
  double ss = 0;
  for (const auto& w : cloud.points) {
    const double ph = x * w.real() + y * w.imag();
    ss += std::norm(std::complex<double>{std::cos(ph), std::sin(ph)} - mean);
  }
  const double n = static_cast<double>(cloud.points.size());
  return std::sqrt(ss / (n * (n - 1.0)));
}

//! Fraction of the cloud inside the closed rectangle.
inline double rectangle_frequency(const SampleCloud& cloud, const Rect& R) {
  if (cloud.points.empty()) throw std::invalid_argument("rectangle_frequency: empty cloud");
  std::size_t inside = 0;
  for (const auto& w : cloud.points)
    if (R.contains(w.real(), w.imag())) ++inside;
  return static_cast<double>(inside) / static_cast<double>(cloud.points.size());
}

//! Normalized 2D histogram over a rectangle grid; points outside the extent
//! are clamped into the edge bins so masses always total 1.
struct Histogram2D {
  Rect extent{0, 1, 0, 1};
  int nx = 0, ny = 0;
  std::vector<double> masses;  // row-major [iy*nx + ix]

  double bin_width_x() const { return (extent.x1 - extent.x0) / nx; }
  double bin_width_y() const { return (extent.y1 - extent.y0) / ny; }
};

inline Histogram2D histogram2d(const SampleCloud& cloud, const Rect& extent, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("histogram2d: need positive bin counts");
  if (cloud.points.empty()) throw std::invalid_argument("histogram2d: empty cloud");
  Histogram2D h;
  h.extent = extent;
  h.nx = nx;
  h.ny = ny;
  h.masses.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  const double wx = h.bin_width_x(), wy = h.bin_width_y();
  for (const auto& p : cloud.points) {
    int ix = static_cast<int>(std::floor((p.real() - extent.x0) / wx));
    int iy = static_cast<int>(std::floor((p.imag() - extent.y0) / wy));
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    h.masses[static_cast<std::size_t>(iy) * nx + ix] += 1.0;
  }
  for (auto& m : h.masses) m /= static_cast<double>(cloud.points.size());
  return h;
}

}  // namespace mfunc
