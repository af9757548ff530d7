// Command line driver: density construction, empirical sampling, mean-value /
// discrepancy comparisons, and the selftest battery.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error,
//             3 numerical-certificate failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfunc/mfunc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string out_dir;
  unsigned threads = 0;
  bool verbose = false;
  std::string config_path;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("MFUNC_OUT_DIR")) return env;
  return ".";
}

mfunc::ExperimentConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty()) return {};
  std::ifstream in(g.config_path);
  if (!in) throw std::invalid_argument("cannot open config: " + g.config_path);
  json j = json::parse(in);  // parse errors carry line/column diagnostics
  return mfunc::ExperimentConfig::from_json(j);
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write: " + p.string());
  out << body;
}

int run_density(const GlobalArgs& g, mfunc::ExperimentConfig cfg) {
  using namespace mfunc;
  const LFunctionSpec spec = LFunctionSpec::parse(cfg.lfunction);
  const std::string digest = cfg.digest();
  const std::uint64_t digest_u = fnv1a64(cfg.to_json().dump());

  CharacteristicGrid grid =
      characteristic_grid(spec, cfg.sigma, cfg.z_max, cfg.grid_n, cfg.p_max, cfg.grid_tol,
                          g.threads);
  DensityGrid dens = invert_to_density(grid, cfg.boundary_tol, g.threads);

  const fs::path out(g.out_dir);
  fs::create_directories(out);
  save_grid(out / "characteristic.bin", grid, digest_u);
  save_grid(out / "density.bin", dens, digest_u);
  export_density_csv(out / "density.csv", dens, digest);
  export_characteristic_csv(out / "characteristic.csv", grid, digest);

  mfunc::ordered_json summary;
  summary["schema_version"] = 1;
  summary["config"] = cfg.to_json();
  summary["config_digest"] = digest;
  summary["mass"] = dens.mass();
  summary["eps_mass"] = dens.eps_mass;
  summary["min_density"] = -dens.eps_ring;
  summary["imag_residue"] = dens.imag_residue;
  summary["inversion_err"] = dens.inversion_err;
  summary["boundary_max"] = grid.boundary_max;
  summary["tail_cert"] = grid.tail_cert;
  summary["w_max"] = dens.w_max;
  try {
    const DecayFit fit = decay_diagnostic(grid);
    summary["decay_fit"] = {{"c", fit.c},
                            {"log_amplitude", fit.log_amplitude},
                            {"rms_residual", fit.rms_residual},
                            {"points", fit.points}};
  } catch (const std::exception& e) {
    summary["decay_fit"] = {{"error", e.what()}};
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  if (g.verbose)
    std::cout << "density: mass=" << dens.mass() << " files in " << out.string() << "\n";
  return 0;
}

int run_empirical(const GlobalArgs& g, mfunc::ExperimentConfig cfg, int hist_n,
                  double hist_extent) {
  using namespace mfunc;
  const LFunctionSpec spec = LFunctionSpec::parse(cfg.lfunction);
  const std::string digest = cfg.digest();

  SampleCloud cloud;
  if (cfg.cloud_source == "random-model") {
    cloud = sample_random_model(spec, cfg.sigma, cfg.X, cfg.count, cfg.seed, g.threads);
  } else if (cfg.cloud_source == "t-line") {
    ApproximantConfig ac{spec, cfg.sigma, cfg.X, ApproximantVariant::f};
    cloud = sample_t_line(ac, cfg.T, cfg.samples, g.threads);
  } else if (cfg.cloud_source == "t-line-direct") {
    cloud = sample_t_line_direct(spec, cfg.sigma, static_cast<std::uint64_t>(cfg.X * cfg.X),
                                 cfg.T, cfg.samples, g.threads);
  } else {
    throw std::invalid_argument("unknown cloud source: " + cfg.cloud_source);
  }

  const fs::path out(g.out_dir);
  fs::create_directories(out);
  export_cloud_csv(out / "cloud.csv", cloud, digest);
  const Histogram2D hist =
      histogram2d(cloud, Rect(-hist_extent, hist_extent, -hist_extent, hist_extent), hist_n,
                  hist_n);
  export_histogram_csv(out / "histogram.csv", hist, digest);
  if (g.verbose)
    std::cout << "empirical: " << cloud.points.size() << " samples -> " << out.string() << "\n";
  return 0;
}

int run_compare(const GlobalArgs& g, mfunc::ExperimentConfig cfg, const std::string& mode) {
  using namespace mfunc;
  const fs::path out(g.out_dir);
  fs::create_directories(out);
  ExperimentReport rep;
  if (mode == "mean-value") {
    rep = run_mean_value(cfg, g.threads);
  } else if (mode == "discrepancy") {
    rep = run_discrepancy(cfg, g.threads);
    // plot-ready ladder table
    std::ofstream csv(out / "discrepancy.csv");
    csv << "# config_digest=" << cfg.digest() << "\n";
    csv << "T,rect_index,nu2,frequency,mass,difference,normalized\n";
    for (const auto& step : rep.payload.at("ladder")) {
      int i = 0;
      for (const auto& row : step.at("rectangles"))
        csv << shortest_double(step.at("T").get<double>()) << ',' << i++ << ','
            << shortest_double(row.at("nu2").get<double>()) << ','
            << shortest_double(row.at("frequency").get<double>()) << ','
            << shortest_double(row.at("mass").get<double>()) << ','
            << shortest_double(row.at("difference").get<double>()) << ','
            << shortest_double(row.at("normalized").get<double>()) << "\n";
    }
  } else {
    throw std::invalid_argument("compare mode must be mean-value or discrepancy");
  }
  write_text(out / "report.json", rep.full().dump(2) + "\n");
  if (g.verbose) std::cout << rep.payload_string() << "\n";
  return 0;
}

int run_selftest_cmd(const GlobalArgs& g, bool quick, std::uint64_t seed) {
  using namespace mfunc;
  const ExperimentReport rep = run_selftest(quick, g.threads, seed);
  const fs::path out(g.out_dir);
  fs::create_directories(out);
  write_text(out / "selftest.json", rep.full().dump(2) + "\n");
  for (const auto& c : rep.payload.at("checks"))
    std::cout << (c.at("pass").get<bool>() ? "PASS" : "FAIL") << "  " << c.at("name").get<std::string>()
              << "  measured=" << c.at("measured").get<double>()
              << " allowed=" << c.at("allowed").get<double>() << "\n";
  return rep.payload.at("all_pass").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density functions for value distributions of L-function logarithmic derivatives"};
  app.require_subcommand(1);

  GlobalArgs g;
  g.out_dir = default_out_dir();
  app.add_option("--out", g.out_dir, "output directory (default: $MFUNC_OUT_DIR or .)");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_flag("--verbose", g.verbose, "chatty output");
  app.add_option("--config", g.config_path, "JSON config file; flags override its values");

  // flag overrides shared by subcommands
  std::optional<std::string> lf, source;
  std::optional<double> sigma, zmax, X, T, tol, btol;
  std::optional<int> grid_n;
  std::optional<std::uint64_t> pmax, count, samples, seed;

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // let --out/--threads/--config appear after the subcommand
    sub->add_option("--lfunction", lf, "zeta | dirichlet:q=Q,index=K | delta | table:PATH");
    sub->add_option("--sigma", sigma, "real part, must exceed 1/2");
    sub->add_option("--seed", seed, "random seed");
  };

  CLI::App* density = app.add_subcommand("density", "build the density grid and summaries");
  add_common(density);
  density->add_option("--pmax", pmax, "Euler product cutoff");
  density->add_option("--grid", grid_n, "lattice points per axis (power of two)");
  density->add_option("--zmax", zmax, "half-width of the characteristic box");
  density->add_option("--tol", tol, "max admissible tail error contribution");
  density->add_option("--boundary-tol", btol, "boundary decay threshold");

  CLI::App* empirical = app.add_subcommand("empirical", "sample clouds and histograms");
  add_common(empirical);
  empirical->add_option("--source", source, "random-model | t-line | t-line-direct");
  empirical->add_option("--X", X, "Dirichlet polynomial cutoff");
  empirical->add_option("--count", count, "random-model sample count");
  empirical->add_option("--T", T, "t-line length");
  empirical->add_option("--samples", samples, "t-line sample count");
  int hist_n = 64;
  double hist_extent = 8.0;
  empirical->add_option("--hist-n", hist_n, "histogram bins per axis");
  empirical->add_option("--hist-extent", hist_extent, "histogram half-width");

  CLI::App* compare = app.add_subcommand("compare", "mean-value / discrepancy reports");
  add_common(compare);
  std::string mode = "mean-value";
  std::string ladder_arg;
  compare->add_option("--mode", mode, "mean-value | discrepancy");
  compare->add_option("--ladder", ladder_arg, "comma-separated T ladder, e.g. 1e3,1e4,1e5");
  compare->add_option("--X", X, "Dirichlet polynomial cutoff");
  compare->add_option("--T", T, "t-line length");
  compare->add_option("--count", count, "random-model sample count");
  compare->add_option("--samples", samples, "t-line sample count");

  CLI::App* selftest = app.add_subcommand("selftest", "run the cross-module oracle suite");
  selftest->fallthrough();
  bool quick = false;
  std::uint64_t st_seed = 1;
  selftest->add_flag("--quick", quick, "reduced sizes, finishes fast");
  selftest->add_option("--seed", st_seed, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    mfunc::ExperimentConfig cfg = load_config(g);
    if (lf) cfg.lfunction = *lf;
    if (sigma) cfg.sigma = *sigma;
    if (zmax) cfg.z_max = *zmax;
    if (grid_n) cfg.grid_n = *grid_n;
    if (pmax) cfg.p_max = *pmax;
    if (tol) cfg.grid_tol = *tol;
    if (btol) cfg.boundary_tol = *btol;
    if (source) cfg.cloud_source = *source;
    if (X) cfg.X = *X;
    if (T) cfg.T = *T;
    if (count) cfg.count = *count;
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    if (!ladder_arg.empty()) {
      cfg.ladder.clear();
      std::stringstream ss(ladder_arg);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.ladder.push_back(std::stod(item));
    }
    if (!(cfg.sigma > 0.5))
      throw std::invalid_argument("sigma must exceed 1/2 (got " + std::to_string(cfg.sigma) + ")");

    if (app.got_subcommand(density)) return run_density(g, cfg);
    if (app.got_subcommand(empirical)) return run_empirical(g, cfg, hist_n, hist_extent);
    if (app.got_subcommand(compare)) return run_compare(g, cfg, mode);
    if (app.got_subcommand(selftest)) return run_selftest_cmd(g, quick, st_seed);
    return 2;
  } catch (const mfunc::certificate_error& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
