#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "mfunc/experiments.hpp"
#include "mfunc/io.hpp"

using namespace mfunc;
using Catch::Matchers::WithinAbs;

namespace {

ExperimentConfig small_mean_value_config() {
  ExperimentConfig c;
  c.lfunction = "zeta";
  c.sigma = 1.2;
  c.grid_n = 128;
  c.z_max = 32.0;
  c.p_max = 2000;
  c.grid_tol = 0.05;
  c.boundary_tol = 1e-7;
  c.phi_kind = "gaussian";
  c.phi_s = 1.0;
  c.cloud_source = "random-model";
  c.X = std::sqrt(2000.0);
  c.count = 100000;
  c.seed = 4;
  return c;
}

}  // namespace

TEST_CASE("mean value experiment: sides agree within certificates", "[experiments]") {
  auto rep = run_mean_value(small_mean_value_config(), 0);
  const auto& res = rep.payload.at("results");
  const auto& cert = rep.payload.at("certificates");
  const double diff = res.at("abs_difference").get<double>();
  const double budget = cert.at("mc_3se").get<double>() + cert.at("density_cert").get<double>() +
                        2e-3;  // model truncation beyond p_max enters through the cloud side
  REQUIRE(diff <= budget);
  const double pv = res.at("rhs_vs_parseval").get<double>();
  REQUIRE(pv <= cert.at("parseval_cert").get<double>() + cert.at("density_cert").get<double>() + 1e-6);
  REQUIRE(cert.at("eps_mass").get<double>() < 1e-3);
  REQUIRE(rep.payload.at("config_digest").get<std::string>().size() == 16);
}

TEST_CASE("mean value experiment is deterministic across thread counts", "[experiments]") {
  auto cfg = small_mean_value_config();
  cfg.count = 20000;
  auto a = run_mean_value(cfg, 1);
  auto b = run_mean_value(cfg, 3);
  REQUIRE(a.payload_string() == b.payload_string());
  // runtime metadata is isolated from the payload
  REQUIRE(a.payload_string().find("elapsed") == std::string::npos);
}

TEST_CASE("schedule echo and 2.3-shaped budget land in the payload", "[experiments]") {
  auto cfg = small_mean_value_config();
  cfg.count = 5000;
  cfg.sched_theta = 0.1;
  cfg.sched_delta = 0.1;
  cfg.sched_T = 1e6;
  auto rep = run_mean_value(cfg, 0);
  REQUIRE(rep.payload.contains("schedule"));
  REQUIRE(rep.payload.at("schedule").at("N").get<long>() % 2 == 0);
  REQUIRE(rep.payload.at("asymptotic_budget").at("value").get<double>() > 0.0);

  // budget decreases along a T ladder (shape factor dominates)
  double prev = 1e300;
  for (double T : {1e4, 1e8, 1e16}) {
    const double L = std::log(T);
    const double shape = std::exp(-0.25 * std::pow(L, 2.0 * 0.1 / 3.0));
    REQUIRE(shape < prev);
    prev = shape;
  }
}

TEST_CASE("discrepancy experiment", "[experiments]") {
  ExperimentConfig cfg;
  cfg.lfunction = "zeta";
  cfg.sigma = 1.2;
  cfg.grid_n = 128;
  cfg.z_max = 32.0;
  cfg.p_max = 2000;
  cfg.grid_tol = 0.05;
  cfg.boundary_tol = 1e-7;
  cfg.cloud_source = "t-line";
  cfg.X = std::sqrt(2000.0);
  cfg.samples = 20000;
  cfg.rectangles = {Rect(-6, 6, -6, 6), Rect(-1, 1, -1, 1), Rect(0, 2, 0, 2)};
  cfg.ladder = {500.0, 5000.0};

  auto rep = run_discrepancy(cfg, 0);
  const auto& ladder = rep.payload.at("ladder");
  REQUIRE(ladder.size() == 2);
  // the full-extent rectangle catches almost everything on both sides
  const auto& big = ladder.at(1).at("rectangles").at(0);
  REQUIRE_THAT(big.at("frequency").get<double>(), WithinAbs(1.0, 5e-3));
  REQUIRE_THAT(big.at("mass").get<double>(), WithinAbs(1.0, 5e-3));
  for (const auto& row : ladder.at(1).at("rectangles"))
    REQUIRE(row.at("normalized").get<double>() <=
            std::abs(row.at("difference").get<double>()) + 1e-15);

  // deterministic across thread counts
  auto rep2 = run_discrepancy(cfg, 2);
  REQUIRE(rep.payload_string() == rep2.payload_string());
}

TEST_CASE("selftest battery passes and reacts to injected faults", "[experiments]") {
  auto rep = run_selftest(true, 0, 1);
  CAPTURE(rep.payload_string());
  REQUIRE(rep.payload.at("all_pass").get<bool>());

  // injected fault: negated density must break normalization
  auto grid = characteristic_grid(LFunctionSpec::zeta(), 1.0, 24.0, 64, 500, 0.2);
  auto dens = invert_to_density(grid, 1e-6);
  REQUIRE(selftest_normalization(dens).pass);
  for (auto& v : dens.values) v = -v;
  REQUIRE_FALSE(selftest_normalization(dens).pass);
}

TEST_CASE("reduced p_max widens certificates but stays consistent", "[experiments]") {
  auto zeta = LFunctionSpec::zeta();
  auto lo = characteristic_grid(zeta, 1.0, 24.0, 64, 500, 0.2);
  auto hi = characteristic_grid(zeta, 1.0, 24.0, 64, 3000, 0.05);
  REQUIRE(lo.tail_cert > hi.tail_cert);
  for (int k : {32, 40, 50})
    for (int j : {32, 36, 44}) {
      const auto a = lo.values[lo.idx(j, k)];
      const auto b = hi.values[hi.idx(j, k)];
      REQUIRE(std::abs(a - b) <= lo.abs_err[lo.idx(j, k)] + hi.abs_err[hi.idx(j, k)] + 1e-12);
    }
}

TEST_CASE("grid containers round trip through disk", "[io]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mfunc_io_test";
  fs::create_directories(dir);

  auto grid = characteristic_grid(LFunctionSpec::zeta(), 1.1, 16.0, 32, 200, 0.5);
  save_grid(dir / "char.bin", grid, 12345);
  std::uint64_t digest = 0;
  auto loaded = load_characteristic_grid(dir / "char.bin", &digest);
  REQUIRE(digest == 12345);
  REQUIRE(loaded.n == grid.n);
  REQUIRE(loaded.sigma == grid.sigma);
  REQUIRE(loaded.z_max == grid.z_max);
  REQUIRE(loaded.p_max == grid.p_max);
  REQUIRE(loaded.spec_name == grid.spec_name);
  REQUIRE(loaded.values == grid.values);
  REQUIRE(loaded.abs_err == grid.abs_err);

  auto dens = invert_to_density(grid, 1.0);
  save_grid(dir / "dens.bin", dens, 999);
  auto dloaded = load_density_grid(dir / "dens.bin");
  REQUIRE(dloaded.values == dens.values);
  REQUIRE(dloaded.w_max == dens.w_max);
  REQUIRE(dloaded.eps_mass == dens.eps_mass);

  export_density_csv(dir / "dens.csv", dens, "deadbeef00000000");
  std::ifstream in(dir / "dens.csv");
  std::string line;
  std::getline(in, line);
  REQUIRE(line.find("config_digest=deadbeef00000000") != std::string::npos);

  fs::remove_all(dir);
}

TEST_CASE("shortest double representation round trips", "[io]") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 42.0}) {
    const std::string s = shortest_double(v);
    REQUIRE(std::stod(s) == v);
  }
  REQUIRE(shortest_double(0.5) == "0.5");
}

TEST_CASE("experiment config digest is stable and sensitive", "[io]") {
  auto c1 = small_mean_value_config();
  auto c2 = small_mean_value_config();
  REQUIRE(c1.digest() == c2.digest());
  c2.seed += 1;
  REQUIRE(c1.digest() != c2.digest());

  // JSON round trip preserves the digest
  auto c3 = ExperimentConfig::from_json(nlohmann::json::parse(c1.to_json().dump()));
  REQUIRE(c3.digest() == c1.digest());
}
