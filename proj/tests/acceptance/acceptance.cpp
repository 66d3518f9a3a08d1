// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/cli.hpp"
#include "cascade/error.hpp"
#include "cascade/front.hpp"
#include "cascade/martingale.hpp"
#include "cascade/recursion.hpp"
#include "cascade/simulation.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, args...);
  return buffer;
}

const double kInvE = 1.0 / std::numbers::e;

Outcome initial_condition() {
  RecursionConfig config;
  config.delta = 0.001;
  config.x_max = 50.0;
  const auto p0 = init_p0(config);
  double worst = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i)
    worst = std::max(worst, std::abs(p0[i] - std::exp(-p0.x_at(i))));
  return {worst == 0.0, fmt("max |P_0 - e^{-x}| = %.3g over %zu nodes", worst, p0.size())};
}

double one_step_error(double delta) {
  RecursionConfig config;
  config.delta = delta;
  config.x_max = 5.0;
  config.n_max = 1;
  const auto p1 = run_recursion(config).final;
  double worst = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i)
    worst = std::max(worst, std::abs(p1[i] - oracle::p1(p1.x_at(i))));
  return worst;
}

Outcome one_step_oracle() {
  const double e1 = one_step_error(0.01);
  const double e2 = one_step_error(0.005);
  const double ratio = e1 / e2;
  const bool pass = e1 <= 5 * 0.01 * 0.01 && e2 <= 5 * 0.005 * 0.005 && ratio >= 3.5 && ratio <= 4.5;
  return {pass, fmt("err(0.01) = %.3e, err(0.005) = %.3e, ratio = %.4f", e1, e2, ratio)};
}

FrontTrace trace(double delta, int n_max, Quadrature q) {
  RecursionConfig config;
  config.delta = delta;
  config.n_max = n_max;
  config.x_max = minimum_front_x_max(n_max);
  config.quadrature = q;
  return trace_fronts(config);
}

Outcome velocity() {
  const FitWindow window{200, 400};
  const double fine = velocity_estimate(trace(0.001, 400, Quadrature::Trapezoid), window).v;
  const double coarse = velocity_estimate(trace(0.01, 400, Quadrature::RightRiemann), window).v;
  const double rel = std::abs(fine - kInvE) / kInvE;
  const bool pass = rel < 0.01 && coarse >= 0.355 && coarse <= 0.372;
  return {pass, fmt("v(0.001, trapezoid) = %.6f (rel. err %.3f%%), v(0.01, riemann) = %.6f",
                    fine, 100 * rel, coarse)};
}

Outcome log_correction() {
  std::mt19937_64 gen(2718);
  std::normal_distribution<double> coef(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double v = 0.3 + 0.1 * std::abs(coef(gen));
    const double b = coef(gen);
    const double a = coef(gen);
    FrontTrace synthetic;
    for (int n = 1; n <= 600; ++n)
      synthetic.entries.push_back({n, v * n + b * std::log(n) + a});
    const auto joint = log_correction_fit(synthetic, {100, 600});
    const auto fixed = log_correction_fit(synthetic, {100, 600}, v);
    worst = std::max({worst, std::abs(joint.v - v), std::abs(joint.b - b), std::abs(joint.a - a),
                      std::abs(fixed.b - b), std::abs(fixed.a - a)});
  }

  const FitWindow window{500, 2000};
  const auto t = trace(0.01, 2000, Quadrature::Trapezoid);
  const double v = richardson_velocity(t, window);
  const auto fit = log_correction_fit(t, window, v);
  const double rel = (fit.b - kLogCorrection) / kLogCorrection;
  const bool pass = std::abs(rel) <= 0.30 && worst <= 1e-9;
  return {pass, fmt("v = %.6f, b = %.4f (%+.1f%% vs %.5f), round-trip error %.2e", v, fit.b,
                    100 * rel, kLogCorrection, worst)};
}

Outcome wave_collapse() {
  RecursionConfig config;
  config.delta = 0.01;
  config.n_max = 100;
  config.x_max = minimum_front_x_max(100);
  const int keep[] = {60, 80, 100};
  const auto result = run_recursion(config, keep);
  const double spread = wave_shape_collapse(result.snapshots);
  return {spread < 0.02, fmt("max spread over u in [-5, 5] = %.3e", spread)};
}

Outcome alpha_star() {
  const double deltas[] = {0.02, 0.01, 0.005, 0.001};
  const auto scan = alpha_scan(deltas, 100);
  bool increasing = true;
  for (std::size_t i = 1; i < scan.size(); ++i)
    increasing = increasing && scan[i].alpha_star > scan[i - 1].alpha_star;
  const bool pass = std::abs(scan[1].alpha_star - 0.9855) <= 0.005 &&
                    std::abs(scan[3].alpha_star - 0.9977) <= 0.002 && increasing;
  return {pass, fmt("alpha* = %.5f, %.5f, %.5f, %.5f for delta = 0.02, 0.01, 0.005, 0.001",
                    scan[0].alpha_star, scan[1].alpha_star, scan[2].alpha_star,
                    scan[3].alpha_star)};
}

Outcome monte_carlo() {
  RecursionConfig rc;
  rc.delta = 0.001;
  rc.x_max = 4.0;
  rc.n_max = 15;
  std::vector<int> all(16);
  for (int n = 0; n <= 15; ++n) all[static_cast<std::size_t>(n)] = n;
  const auto recursion = run_recursion(rc, all);

  double worst_z = 0.0;
  double worst_trunc = 0.0;
  int misses = 0;
  for (double x : {1.0, 2.0, 3.0}) {
    SimConfig sim;
    sim.x = x;
    sim.trials = 100000;
    sim.n_cap = 15;
    sim.seed = 20250;
    const auto cdf = empirical_cdf(sim);
    worst_trunc = std::max(worst_trunc, static_cast<double>(cdf.truncated) / cdf.trials);
    for (int n = 0; n <= 15; ++n) {
      const double p = eval(recursion.snapshot(n), x);
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(cdf.trials));
      const double diff = std::abs(cdf.p_hat(n) - p);
      if (diff > 3.0 * sigma) ++misses;
      if (sigma > 0.0) worst_z = std::max(worst_z, diff / sigma);
    }
  }
  const bool pass = misses == 0 && worst_trunc < 0.001;
  return {pass, fmt("largest |p_hat - P_n| / sigma = %.2f over 48 points, %d outside 3 sigma, "
                    "truncated fraction %.1e",
                    worst_z, misses, worst_trunc)};
}

Outcome discrete_continuum() {
  const auto large = compare_discrete_continuum(2000, 2.0, 20000, 8080);
  const auto small = compare_discrete_continuum(10, 2.0, 20000, 8080);
  const bool pass = large.ks_statistic < large.ks_critical_1pct &&
                    small.ks_statistic > large.ks_statistic;
  return {pass, fmt("KS(n=2000) = %.4f (1%% critical %.4f), KS(n=10) = %.4f", large.ks_statistic,
                    large.ks_critical_1pct, small.ks_statistic)};
}

Outcome moments() {
  const auto r = verify_boundary_conditions();
  const double second = std::abs(r.second_moment_integral - std::numbers::e);
  const bool pass = r.m1_residual < 1e-10 && r.m2_residual < 1e-10 && second < 1e-10;
  return {pass, fmt("m1 residual %.2e, m2 residual %.2e, |integral - e| = %.2e", r.m1_residual,
                    r.m2_residual, second)};
}

Outcome limit_probe() {
  RecursionConfig rc;
  rc.delta = 0.001;
  rc.n_max = 200;
  rc.x_max = minimum_front_x_max(200);
  const int keep[] = {99, 149, 199};
  const int ns[] = {100, 150, 200};
  const double z[] = {0.0};
  const auto table = equivalence_check(run_recursion(rc, keep), z, ns);
  const auto& row = table.rows.front();
  const auto [lo, hi] = std::minmax_element(row.values.begin(), row.values.end());
  const bool pass = row.spread < 0.05 && *lo > 0.05 && *hi < 0.95;
  return {pass, fmt("P_{n-1} at the probe = %.4f, %.4f, %.4f (spread %.4f)", row.values[0],
                    row.values[1], row.values[2], row.spread)};
}

Outcome longest_path_oracle() {
  std::mt19937_64 meta(1111);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    Rng rng = substream(1112, static_cast<std::uint64_t>(k));
    const auto g = sample_cascade_edges(size(meta), prob(meta), rng);
    if (longest_path_from_first(g) != oracle::longest_path_brute_force(g.out)) ++mismatches;
  }
  return {mismatches == 0, fmt("%d mismatches in 1000 graphs", mismatches)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "cascade_acceptance_determinism";
  fs::remove_all(root);

  using Params = std::map<std::string, std::string>;
  const std::vector<std::pair<cli::Command, Params>> runs{
      {cli::Command::Recurse, {{"nmax", "50"}, {"snapshots", "10,50"}}},
      {cli::Command::Front, {{"nmax", "200"}}},
      {cli::Command::Simulate, {{"x", "1"}, {"trials", "100000"}}},
      {cli::Command::Graph, {{"vertices", "500"}, {"trials", "5000"}}},
      {cli::Command::Brw, {{"trials", "300"}, {"generations", "15"}, {"probe", "true"}}},
      {cli::Command::Compare, {{"vertices", "300"}, {"trials", "5000"}}},
      {cli::Command::AlphaScan, {{"deltas", "0.02,0.01"}, {"nmax", "60"}}},
  };

  int compared = 0;
  int differing = 0;
  std::ostringstream sink;
  for (const auto& [command, params] : runs) {
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "1", "4"}) {
      cli::RunManifest m;
      m.command = command;
      m.parameters = params;
      if (cli::Params(command, {}).resolved().count("threads")) m.parameters["threads"] = threads;
      m.seed = 424242;
      m.output_dir = root / (std::string(cli::to_string(command)) + "_" +
                             std::to_string(dirs.size()));
      if (cli::run(m, sink, sink) != 0) return {false, "run failed: " + sink.str()};
      dirs.push_back(m.output_dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      const std::string reference = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        ++compared;
        if (slurp(dirs[k] / entry.path().filename()) != reference) ++differing;
      }
    }
  }
  fs::remove_all(root);
  return {differing == 0 && compared > 0,
          fmt("%d CSV comparisons across reruns and 1 vs 4 threads, %d differ", compared,
              differing)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "initial condition", initial_condition},
      {2, "one-step oracle", one_step_oracle},
      {3, "front velocity", velocity},
      {4, "logarithmic correction", log_correction},
      {5, "wave collapse", wave_collapse},
      {6, "alpha scan", alpha_star},
      {7, "Monte Carlo vs recursion", monte_carlo},
      {8, "discrete vs continuum", discrete_continuum},
      {9, "boundary-case moments", moments},
      {10, "limit-law probe", limit_probe},
      {11, "longest-path oracle", longest_path_oracle},
      {12, "determinism", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2d. %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
