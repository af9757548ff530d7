#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfunc/density.hpp"
#include "mfunc/empirical.hpp"
#include "mfunc/io.hpp"
#include "mfunc/testfn.hpp"

namespace mfunc {

using ordered_json = nlohmann::ordered_json;

//! Everything needed to reproduce one experiment run.
struct ExperimentConfig {
  std::string lfunction = "zeta";
  double sigma = 1.0;

  int grid_n = 512;
  double z_max = 40.0;
  std::uint64_t p_max = 10000;
  double grid_tol = 1e-3;
  double boundary_tol = 1e-8;

  std::string phi_kind = "gaussian";  // "gaussian" | "box-fejer"
  double phi_s = 1.0;
  double phi_a = -1, phi_b = 1, phi_c = -1, phi_d = 1, phi_omega = 10;

  std::string cloud_source = "random-model";  // "random-model" | "t-line"
  double X = 100.0;
  std::uint64_t count = 200000;  // random-model sample count
  double T = 1e5;                // t-line length
  std::uint64_t samples = 200000;  // t-line sample count
  std::uint64_t seed = 1;

  std::vector<Rect> rectangles;  // empty -> default suite
  std::vector<double> ladder;    // empty -> single T

  std::optional<double> sched_theta, sched_delta, sched_T;

  ordered_json to_json() const {
    ordered_json j;
    j["lfunction"] = lfunction;
    j["sigma"] = sigma;
    j["grid"] = {{"n", grid_n},
                 {"z_max", z_max},
                 {"p_max", p_max},
                 {"tol", grid_tol},
                 {"boundary_tol", boundary_tol}};
    if (phi_kind == "gaussian") {
      j["phi"] = {{"kind", phi_kind}, {"s", phi_s}};
    } else {
      j["phi"] = {{"kind", phi_kind}, {"a", phi_a}, {"b", phi_b},
                  {"c", phi_c},       {"d", phi_d}, {"omega", phi_omega}};
    }
    j["cloud"] = {{"source", cloud_source}, {"X", X},       {"count", count},
                  {"T", T},                 {"samples", samples}, {"seed", seed}};
    if (!rectangles.empty()) {
      ordered_json rs = ordered_json::array();
      for (const auto& r : rectangles) rs.push_back({r.x0, r.x1, r.y0, r.y1});
      j["rectangles"] = rs;
    }
    if (!ladder.empty()) j["ladder"] = ladder;
    if (sched_theta && sched_delta && sched_T)
      j["schedule"] = {{"theta", *sched_theta}, {"delta", *sched_delta}, {"T", *sched_T}};
    return j;
  }

  std::string digest() const { return digest_hex(to_json().dump()); }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.lfunction = j.value("lfunction", c.lfunction);
    c.sigma = j.value("sigma", c.sigma);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid_n = g.value("n", c.grid_n);
      c.z_max = g.value("z_max", c.z_max);
      c.p_max = g.value("p_max", c.p_max);
      c.grid_tol = g.value("tol", c.grid_tol);
      c.boundary_tol = g.value("boundary_tol", c.boundary_tol);
    }
    if (j.contains("phi")) {
      const auto& p = j.at("phi");
      c.phi_kind = p.value("kind", c.phi_kind);
      c.phi_s = p.value("s", c.phi_s);
      c.phi_a = p.value("a", c.phi_a);
      c.phi_b = p.value("b", c.phi_b);
      c.phi_c = p.value("c", c.phi_c);
      c.phi_d = p.value("d", c.phi_d);
      c.phi_omega = p.value("omega", c.phi_omega);
    }
    if (j.contains("cloud")) {
      const auto& s = j.at("cloud");
      c.cloud_source = s.value("source", c.cloud_source);
      c.X = s.value("X", c.X);
      c.count = s.value("count", c.count);
      c.T = s.value("T", c.T);
      c.samples = s.value("samples", c.samples);
      c.seed = s.value("seed", c.seed);
    }
    if (j.contains("rectangles"))
      for (const auto& r : j.at("rectangles"))
        c.rectangles.emplace_back(r.at(0).get<double>(), r.at(1).get<double>(),
                                  r.at(2).get<double>(), r.at(3).get<double>());
    if (j.contains("ladder")) c.ladder = j.at("ladder").get<std::vector<double>>();
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      c.sched_theta = s.value("theta", 0.1);
      c.sched_delta = s.value("delta", 0.1);
      c.sched_T = s.value("T", 1e5);
    }
    return c;
  }
};

//! Deterministic payload (byte-identical under fixed config + seed) plus
//! isolated runtime metadata.
struct ExperimentReport {
  ordered_json payload;
  ordered_json runtime;

  std::string payload_string() const { return payload.dump(2); }

  ordered_json full() const {
    ordered_json j;
    j["schema_version"] = 1;
    j["payload"] = payload;
    j["runtime"] = runtime;
    return j;
  }
};

namespace detail {

inline TestFunction phi_from_config(const ExperimentConfig& c) {
  if (c.phi_kind == "gaussian") return gaussian_phi(c.phi_s);
  if (c.phi_kind == "box-fejer")
    return product_phi(box_fejer_1d(c.phi_a, c.phi_b, c.phi_omega),
                       box_fejer_1d(c.phi_c, c.phi_d, c.phi_omega));
  throw std::invalid_argument("unknown phi kind: " + c.phi_kind);
}

inline SampleCloud cloud_from_config(const ExperimentConfig& c, const LFunctionSpec& spec,
                                     unsigned threads, std::optional<double> T_override = {}) {
  if (c.cloud_source == "random-model")
    return sample_random_model(spec, c.sigma, c.X, c.count, c.seed, threads);
  if (c.cloud_source == "t-line") {
    ApproximantConfig ac{spec, c.sigma, c.X, ApproximantVariant::f};
    return sample_t_line(ac, T_override.value_or(c.T), c.samples, threads);
  }
  throw std::invalid_argument("unknown cloud source: " + c.cloud_source);
}

//! Mean of a real function over the cloud plus its 3-sigma standard error,
//! with a fixed-order reduction.
inline std::pair<double, double> cloud_mean(const SampleCloud& cloud,
                                            const std::function<double(std::complex<double>)>& f) {
  std::vector<double> partial;
  double acc = 0, acc2 = 0;
  std::vector<double> partial2;
  for (std::size_t j = 0; j < cloud.points.size(); ++j) {
    const double v = f(cloud.points[j]);
    acc += v;
    acc2 += v * v;
    if ((j + 1) % 4096 == 0) {
      partial.push_back(acc);
      partial2.push_back(acc2);
      acc = acc2 = 0;
    }
  }
  partial.push_back(acc);
  partial2.push_back(acc2);
  const double n = static_cast<double>(cloud.points.size());
  const double mean = pairwise_sum(partial) / n;
  const double var = std::max(0.0, pairwise_sum(partial2) / n - mean * mean);
  return {mean, 3.0 * std::sqrt(var / n)};
}

inline std::vector<Rect> default_rectangles() {
  return {Rect(-0.5, 0.5, -0.5, 0.5),  Rect(-1, 1, -1, 1),
          Rect(-2, 2, -2, 2),          Rect(-4, 4, -4, 4),
          Rect(0, 2, 0, 2),            Rect(-3, -0.5, -1, 1),
          Rect(-1, 1, 0.25, 2.25),     Rect(-6, 6, -6, 6)};
}

inline ordered_json schedule_json(const ScheduleParams& s) {
  ordered_json j;
  j["theta"] = s.theta;
  j["delta"] = s.delta;
  j["T"] = s.T;
  j["theta1"] = s.theta1;
  j["theta2"] = s.theta2;
  j["theta3"] = s.theta3;
  j["X"] = s.X;
  j["Y"] = s.Y;
  j["N"] = s.N;
  j["omega_half_width"] = s.omega_half_width;
  return j;
}

inline double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

//! Mean-value comparison: cloud average of Phi against the density integral
//! and the transform-side (Parseval route) integral.
inline ExperimentReport run_mean_value(const ExperimentConfig& cfg, unsigned threads = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  const LFunctionSpec spec = LFunctionSpec::parse(cfg.lfunction);
  const TestFunction phi = detail::phi_from_config(cfg);

  CharacteristicGrid grid = characteristic_grid(spec, cfg.sigma, cfg.z_max, cfg.grid_n,
                                                cfg.p_max, cfg.grid_tol, threads);
  DensityGrid dens = invert_to_density(grid, cfg.boundary_tol, threads);
  SampleCloud cloud = detail::cloud_from_config(cfg, spec, threads);

  auto [lhs, mc_3se] = detail::cloud_mean(cloud, [&](std::complex<double> w) { return phi(w); });

  // density side: sum Phi(z) M(z) |dz|
  double rhs = 0, phi_mass = 0;
  for (int m = 0; m < dens.n; ++m)
    for (int l = 0; l < dens.n; ++l) {
      const double pv = phi({dens.x(l), dens.y(m)});
      rhs += pv * dens.values[dens.idx(l, m)];
      phi_mass += std::abs(pv);
    }
  rhs *= dens.cell_measure;
  phi_mass *= dens.cell_measure;

  // Parseval side: sum Phi^(w) conj(M~(w)) |dw|  (M~(-w) = conj M~(w))
  std::complex<double> parseval{0.0, 0.0};
  double transform_abs_mass = 0, parseval_cert = 0;
  const double cell_w = grid.dx() * grid.dx() / (2.0 * std::numbers::pi);
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const std::complex<double> ph = phi.transform({grid.x(j), grid.y(k)});
      parseval += ph * std::conj(grid.values[grid.idx(j, k)]);
      transform_abs_mass += std::abs(ph);
      parseval_cert += std::abs(ph) * grid.abs_err[grid.idx(j, k)];
    }
  parseval *= cell_w;
  transform_abs_mass *= cell_w;
  parseval_cert *= cell_w;

  // |sum Phi dM cell| <= pointwise inversion error * L1 lattice mass of Phi
  const double density_cert = dens.inversion_err * phi_mass;

  ExperimentReport rep;
  auto& p = rep.payload;
  p["schema_version"] = 1;
  p["kind"] = "mean_value";
  p["config"] = cfg.to_json();
  p["config_digest"] = cfg.digest();
  if (cfg.sched_theta && cfg.sched_delta && cfg.sched_T) {
    const ScheduleParams s = schedule(*cfg.sched_theta, *cfg.sched_delta, *cfg.sched_T);
    p["schedule"] = detail::schedule_json(s);
    // asymptotic budget: exp(-(1/4)(log T)^(2 theta/3)) |Phi^|_L1(box) + |Phi^|_L1(outside)
    double inside = 0;
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j)
        if (std::abs(grid.x(j)) <= s.omega_half_width && std::abs(grid.y(k)) <= s.omega_half_width)
          inside += std::abs(phi.transform({grid.x(j), grid.y(k)}));
    inside *= cell_w;
    double total = transform_abs_mass;
    if (phi.kind() == TestFunction::Kind::gaussian) total = 1.0;  // analytic L1 norm
    const double outside = std::max(0.0, total - inside);
    const double shape = std::exp(-0.25 * std::pow(std::log(s.T), 2.0 * s.theta / 3.0));
    p["asymptotic_budget"] = {{"shape_factor", shape},
                       {"phi_hat_l1_omega", inside},
                       {"phi_hat_l1_outside", outside},
                       {"value", shape * inside + outside}};
  }
  p["results"] = {{"lhs_cloud_mean", lhs},
                  {"rhs_density_integral", rhs},
                  {"parseval_rhs_re", parseval.real()},
                  {"parseval_rhs_im", parseval.imag()},
                  {"difference", lhs - rhs},
                  {"abs_difference", std::abs(lhs - rhs)},
                  {"rhs_vs_parseval", std::abs(rhs - parseval.real())}};
  p["certificates"] = {{"mc_3se", mc_3se},
                       {"density_cert", density_cert},
                       {"parseval_cert", parseval_cert},
                       {"cloud_trunc_cert", cloud.trunc_cert},
                       {"grid_tail_cert", grid.tail_cert},
                       {"grid_max_abs_err", grid.max_abs_err()},
                       {"eps_mass", dens.eps_mass},
                       {"eps_ring", dens.eps_ring},
                       {"imag_residue", dens.imag_residue}};
  rep.runtime = {{"elapsed_seconds", detail::now_seconds(t0)}, {"threads", resolve_threads(threads)}};
  return rep;
}

//! Rectangle discrepancy: t-line (or random-model) frequencies against
//! density masses, optionally across a T-ladder.
inline ExperimentReport run_discrepancy(const ExperimentConfig& cfg, unsigned threads = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  const LFunctionSpec spec = LFunctionSpec::parse(cfg.lfunction);
  CharacteristicGrid grid = characteristic_grid(spec, cfg.sigma, cfg.z_max, cfg.grid_n,
                                                cfg.p_max, cfg.grid_tol, threads);
  DensityGrid dens = invert_to_density(grid, cfg.boundary_tol, threads);

  const std::vector<Rect> rects =
      cfg.rectangles.empty() ? detail::default_rectangles() : cfg.rectangles;
  std::vector<double> masses;
  for (const auto& r : rects) masses.push_back(rectangle_mass(dens, r));

  std::vector<double> ladder = cfg.ladder.empty() ? std::vector<double>{cfg.T} : cfg.ladder;

  ExperimentReport rep;
  auto& p = rep.payload;
  p["schema_version"] = 1;
  p["kind"] = "discrepancy";
  p["config"] = cfg.to_json();
  p["config_digest"] = cfg.digest();
  if (cfg.sched_theta && cfg.sched_delta && cfg.sched_T)
    p["schedule"] = detail::schedule_json(schedule(*cfg.sched_theta, *cfg.sched_delta, *cfg.sched_T));

  ordered_json ladder_out = ordered_json::array();
  for (double T : ladder) {
    SampleCloud cloud = detail::cloud_from_config(cfg, spec, threads, T);
    ordered_json rows = ordered_json::array();
    double max_norm = 0, mean_norm = 0;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      const double freq = rectangle_frequency(cloud, rects[i]);
      const double diff = freq - masses[i];
      const double nu2 = rects[i].area();
      const double norm = std::abs(diff) / (nu2 + 1.0);
      max_norm = std::max(max_norm, norm);
      mean_norm += norm;
      rows.push_back({{"rect", {rects[i].x0, rects[i].x1, rects[i].y0, rects[i].y1}},
                      {"nu2", nu2},
                      {"frequency", freq},
                      {"mass", masses[i]},
                      {"difference", diff},
                      {"normalized", norm}});
    }
    mean_norm /= static_cast<double>(rects.size());
    ladder_out.push_back({{"T", T},
                          {"samples", cfg.samples},
                          {"rectangles", rows},
                          {"max_normalized_discrepancy", max_norm},
                          {"mean_normalized_discrepancy", mean_norm},
                          {"cloud_trunc_cert", cloud.trunc_cert}});
  }
  p["ladder"] = ladder_out;
  p["certificates"] = {{"grid_tail_cert", grid.tail_cert},
                       {"grid_max_abs_err", grid.max_abs_err()},
                       {"eps_mass", dens.eps_mass},
                       {"eps_ring", dens.eps_ring},
                       {"imag_residue", dens.imag_residue},
                       {"inversion_err", dens.inversion_err}};
  rep.runtime = {{"elapsed_seconds", detail::now_seconds(t0)}, {"threads", resolve_threads(threads)}};
  return rep;
}

// --- self test ----------------------------------------------------------------

struct SelfTestCheck {
  std::string name;
  double measured = 0;
  double allowed = 0;
  bool pass = false;
};

inline SelfTestCheck make_check(std::string name, double measured, double allowed) {
  SelfTestCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.allowed = allowed;
  c.pass = measured <= allowed;
  return c;
}

//! Normalization check on a density grid: |mass - 1| within tolerance.
inline SelfTestCheck selftest_normalization(const DensityGrid& d, double tol = 1e-3) {
  return make_check("normalization", std::abs(d.mass() - 1.0), tol);
}

//! Gaussian self-duality through the full inversion path.
inline SelfTestCheck selftest_gaussian_selfduality(int n = 256, double z_max = 20.0,
                                                   unsigned threads = 0) {
  auto g = characteristic_grid_from_function(
      [](double x, double y) { return std::exp(-(x * x + y * y) / 2.0); }, z_max, n);
  DensityGrid d = invert_to_density(g, 1e-8, threads);
  double max_err = 0;
  for (int m = 0; m < d.n; ++m)
    for (int l = 0; l < d.n; ++l) {
      const double want = std::exp(-(d.x(l) * d.x(l) + d.y(m) * d.y(m)) / 2.0);
      max_err = std::max(max_err, std::abs(d.values[d.idx(l, m)] - want));
    }
  return make_check("gaussian_selfduality", max_err, 1e-6);
}

//! Random-model characteristic function against the truncated Euler product.
inline SelfTestCheck selftest_mc_identity(const LFunctionSpec& spec, double sigma, double X,
                                          std::uint64_t count, std::uint64_t seed,
                                          unsigned threads = 0) {
  SampleCloud cloud = sample_random_model(spec, sigma, X, count, seed, threads);
  double worst_margin = -1e300;  // measured - allowed, per point; pass when <= 0
  const auto pmax = static_cast<std::uint64_t>(X * X);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      const std::complex<double> z{0.75 * a, 0.75 * b};
      const std::complex<double> emp = empirical_char(cloud, z);
      const LocalFactorValue prod = characteristic_value(spec, sigma, z, pmax, false);
      const double se = empirical_char_stderr(cloud, z);
      const double allowed = 3.0 * se + prod.abs_error + std::abs(z) * cloud.trunc_cert;
      worst_margin = std::max(worst_margin, std::abs(emp - prod.value) - allowed);
    }
  return make_check("random_model_identity", worst_margin, 0.0);
}

//! Expansion vs quadrature agreement on random admissible draws.
inline SelfTestCheck selftest_expansion_agreement(std::uint64_t seed = 11, int draws = 40) {
  const LFunctionSpec zeta = LFunctionSpec::zeta();
  CounterRng rng(seed);
  PrimeTable pt(100000);
  double worst = -1e300;
  int done = 0;
  for (std::uint64_t i = 0; done < draws && i < 100000; ++i) {
    const double u = rng.unit(0, i);
    const std::size_t lo = pt.count_up_to(1000);
    const auto idx = lo + static_cast<std::size_t>(u * (pt.primes().size() - lo));
    const std::uint64_t p = pt.primes()[std::min(idx, pt.primes().size() - 1)];
    const double sigma = 0.8 + 0.7 * rng.unit(1, i);
    const double r = 5.0 * std::sqrt(rng.unit(2, i));
    const double ang = 2.0 * std::numbers::pi * rng.unit(3, i);
    const std::complex<double> z{r * std::cos(ang), r * std::sin(ang)};
    const LocalSeries s = local_series(zeta, p, sigma, 1e-14);
    if (!expansion_applicable(s, z)) continue;
    ++done;
    const LocalFactorValue q = local_factor_quadrature(s, z, std::max(8, 4 * s.m_max));
    const LocalFactorValue e = local_factor_expansion(s, z);
    worst = std::max(worst, std::abs(q.value - e.value) - e.abs_error);
  }
  return make_check("expansion_agreement", worst, 0.0);
}

//! Full selftest battery.  `quick` shrinks grids and sample counts.
inline ExperimentReport run_selftest(bool quick = false, unsigned threads = 0,
                                     std::uint64_t seed = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SelfTestCheck> checks;

  checks.push_back(selftest_gaussian_selfduality(quick ? 128 : 256, 20.0, threads));

  const LFunctionSpec zeta = LFunctionSpec::zeta();
  const double sigma = 1.0;
  const int n = quick ? 128 : 256;
  const double z_max = quick ? 24.0 : 32.0;
  const std::uint64_t p_max = quick ? 3000 : 10000;
  CharacteristicGrid grid = characteristic_grid(zeta, sigma, z_max, n, p_max, 1e-2, threads);
  DensityGrid dens = invert_to_density(grid, 1e-7, threads);

  checks.push_back(selftest_normalization(dens, 1e-3));
  checks.push_back(make_check("imag_residue", dens.imag_residue, 1e-10));
  checks.push_back(make_check("density_ring", dens.eps_ring, 1e-4));

  {  // conj(M(-z)) = M(z); evenness in y for real-coefficient data
    double worst = 0;
    for (int k = 1; k < grid.n; ++k)
      for (int j = 1; j < grid.n; ++j) {
        const auto v = grid.values[grid.idx(j, k)];
        const double e_v = grid.abs_err[grid.idx(j, k)];
        const auto neg = grid.values[grid.idx(grid.n - j, grid.n - k)];
        worst = std::max(worst, std::abs(v - std::conj(neg)) - e_v -
                                    grid.abs_err[grid.idx(grid.n - j, grid.n - k)]);
        const auto yflip = grid.values[grid.idx(j, grid.n - k)];
        worst = std::max(worst,
                         std::abs(v - yflip) - e_v - grid.abs_err[grid.idx(j, grid.n - k)]);
      }
    checks.push_back(make_check("conjugate_symmetry", worst, 1e-12));
  }

  {  // Parseval route with a Gaussian
    const TestFunction phi = gaussian_phi(1.0);
    double rhs = 0;
    for (int m = 0; m < dens.n; ++m)
      for (int l = 0; l < dens.n; ++l)
        rhs += phi({dens.x(l), dens.y(m)}) * dens.values[dens.idx(l, m)];
    rhs *= dens.cell_measure;
    std::complex<double> par{0, 0};
    double cert = 0;
    const double cell_w = grid.dx() * grid.dx() / (2.0 * std::numbers::pi);
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j) {
        const auto ph = phi.transform({grid.x(j), grid.y(k)});
        par += ph * std::conj(grid.values[grid.idx(j, k)]);
        cert += std::abs(ph) * grid.abs_err[grid.idx(j, k)];
      }
    par *= cell_w;
    cert = cert * cell_w + dens.inversion_err + 1e-9;
    checks.push_back(make_check("parseval_consistency", std::abs(rhs - par.real()), cert));
  }

  checks.push_back(selftest_mc_identity(zeta, 1.0, quick ? 5.0 : 10.0,
                                        quick ? 20000 : 100000, seed, threads));
  checks.push_back(selftest_expansion_agreement(seed + 1, quick ? 20 : 40));

  {  // strict decay along the real axis
    const auto v10 = characteristic_value(zeta, 1.0, {10.0, 0.0}, p_max, false);
    const auto v20 = characteristic_value(zeta, 1.0, {20.0, 0.0}, p_max, false);
    checks.push_back(
        make_check("characteristic_decay", std::abs(v20.value) - std::abs(v10.value), 0.0));
  }

  ExperimentReport rep;
  auto& p = rep.payload;
  p["schema_version"] = 1;
  p["kind"] = "selftest";
  p["quick"] = quick;
  p["seed"] = seed;
  ordered_json arr = ordered_json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"measured", c.measured}, {"allowed", c.allowed},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  p["checks"] = arr;
  p["all_pass"] = all;
  rep.runtime = {{"elapsed_seconds", detail::now_seconds(t0)}, {"threads", resolve_threads(threads)}};
  return rep;
}

}  // namespace mfunc
