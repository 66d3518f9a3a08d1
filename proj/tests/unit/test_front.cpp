#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "cascade/csv.hpp"
#include "cascade/error.hpp"
#include "cascade/front.hpp"
#include "cascade/recursion.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

RecursionConfig make_config(double delta, double x_max, int n_max,
                            Quadrature q = Quadrature::Trapezoid) {
  RecursionConfig c;
  c.delta = delta;
  c.x_max = x_max;
  c.n_max = n_max;
  c.quadrature = q;
  return c;
}

FrontTrace synthetic_trace(int n_lo, int n_hi, auto model) {
  FrontTrace t;
  for (int n = n_lo; n <= n_hi; ++n) t.entries.push_back({n, model(static_cast<double>(n))});
  return t;
}

std::vector<int> all_generations(int n_max) {
  std::vector<int> g(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) g[static_cast<std::size_t>(n)] = n;
  return g;
}

}  // namespace

TEST_CASE("front_position on known curves") {
  const auto config = make_config(0.01, 10.0, 1);
  const auto p0 = init_p0(config);
  CHECK(std::abs(front_position(p0) - std::log(2.0)) < 0.01);

  const auto p1 = iterate_step(p0, config);
  const double expected = oracle::p1_front(0.5);
  CHECK(expected == doctest::Approx(1.4611862).epsilon(1e-7));
  CHECK(std::abs(front_position(p1) - expected) < 1e-3);

  const auto one = GridFunction::from_values(0.01, 0, std::vector<double>(config.nodes(), 1.0));
  CHECK_THROWS_AS(front_position(one), FrontNotFound);
  CHECK_THROWS_AS(front_position(p0, 1.5), ConfigError);
}

TEST_CASE("lower levels are crossed further right") {
  const int wanted[] = {30};
  const auto r = run_recursion(make_config(0.01, 40.0, 30), wanted);
  const auto& f = r.snapshot(30);
  CHECK(front_position(f, 0.25) > front_position(f, 0.5));
  CHECK(front_position(f, 0.5) > front_position(f, 0.75));
}

TEST_CASE("front is stable under grid refinement") {
  const int wanted[] = {20};
  const auto coarse = run_recursion(make_config(0.01, 30.0, 20), wanted).snapshot(20);
  const auto fine = run_recursion(make_config(0.005, 30.0, 20), wanted).snapshot(20);
  CHECK(std::abs(front_position(coarse) - front_position(fine)) < 2 * 0.01);
}

TEST_CASE("trace_fronts enforces the domain margin and is increasing") {
  CHECK_THROWS_AS(trace_fronts(make_config(0.01, 50.0, 100)), ConfigError);
  const auto trace = trace_fronts(make_config(0.01, minimum_front_x_max(100), 100));
  REQUIRE(trace.entries.size() == 101);
  for (std::size_t k = 2; k < trace.entries.size(); ++k) {
    const double gap = trace.entries[k].x - trace.entries[k - 1].x;
    CHECK(gap > 0.0);
    if (k > 20) CHECK(gap < 1.0);
  }
  CHECK_THROWS_AS(trace.at(500), FitError);
}

TEST_CASE("velocity_estimate") {
  SUBCASE("exact linear data") {
    const auto t = synthetic_trace(0, 100, [](double n) { return 0.25 * n; });
    const auto fit = velocity_estimate(t, {10, 90});
    CHECK(fit.v == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(fit.b == 0.0);
    CHECK(fit.residual_rms < 1e-12);
  }
  SUBCASE("equal gaps give the gap exactly") {
    for (double d : {0.1, 0.367, 1.0 / 3.0}) {
      const auto t = synthetic_trace(1, 60, [d](double n) { return 2.5 + d * n; });
      CHECK(std::abs(velocity_estimate(t, {1, 60}).v - d) < 1e-12);
    }
  }
  SUBCASE("window too small") {
    const auto t = synthetic_trace(0, 100, [](double n) { return n; });
    CHECK_THROWS_AS(velocity_estimate(t, {10, 18}), FitError);
    CHECK_THROWS_AS(velocity_estimate(t, {50, 40}), FitError);
  }
}

TEST_CASE("log_correction_fit round-trips its own model") {
  const double inv_e = 1.0 / std::numbers::e;
  SUBCASE("with fixed velocity") {
    const auto t = synthetic_trace(1, 2000, [&](double n) {
      return n * inv_e + kLogCorrection * std::log(n) + 0.7;
    });
    const auto fit = log_correction_fit(t, {500, 2000}, inv_e);
    CHECK(std::abs(fit.b - 0.551819161757) < 1e-9);
    CHECK(std::abs(fit.a - 0.7) < 1e-9);
    CHECK(fit.v == inv_e);
    CHECK(fit.window.lo == 500);
    CHECK(fit.window.hi == 2000);
  }
  SUBCASE("joint velocity") {
    const auto t = synthetic_trace(1, 2000, [&](double n) {
      return 0.3 * n - 0.2 * std::log(n) + 1.5;
    });
    const auto fit = log_correction_fit(t, {500, 2000});
    CHECK(std::abs(fit.v - 0.3) < 1e-9);
    CHECK(std::abs(fit.b + 0.2) < 1e-9);
    CHECK(std::abs(fit.a - 1.5) < 1e-9);
  }
  SUBCASE("no correction") {
    const auto t = synthetic_trace(1, 2000, [&](double n) { return n * inv_e; });
    const auto fit = log_correction_fit(t, {500, 2000}, inv_e);
    CHECK(std::abs(fit.b) < 1e-9);
  }
  SUBCASE("degenerate windows") {
    const auto t = synthetic_trace(1, 2000, [&](double n) { return n * inv_e; });
    CHECK_THROWS_AS(log_correction_fit(t, {500, 540}, inv_e), FitError);
    CHECK_THROWS_AS(log_correction_fit(t, {500, 1200}, inv_e), FitError);
  }
}

TEST_CASE("Richardson velocity removes the log-induced slope bias") {
  const double inv_e = 1.0 / std::numbers::e;
  const auto t = synthetic_trace(1, 2000, [&](double n) {
    return n * inv_e + kLogCorrection * std::log(n) + 0.3;
  });
  const double naive = velocity_estimate(t, {500, 2000}).v;
  const double extrapolated = richardson_velocity(t, {500, 2000});
  CHECK(std::abs(naive - inv_e) > 1e-4);
  CHECK(std::abs(extrapolated - inv_e) < 1e-5);
  CHECK_THROWS_AS(richardson_velocity(t, {10, 12}), FitError);
}

TEST_CASE("wave-shape collapse") {
  const int wanted[] = {1, 80, 100};
  const auto r = run_recursion(make_config(0.01, 60.0, 100), wanted);
  const std::vector<GridFunction> same{r.snapshot(100), r.snapshot(100)};
  CHECK(wave_shape_collapse(same) == 0.0);
  const std::vector<GridFunction> late{r.snapshot(80), r.snapshot(100)};
  const double late_spread = wave_shape_collapse(late);
  CHECK(late_spread < 0.02);
  const std::vector<GridFunction> early{r.snapshot(1), r.snapshot(100)};
  CHECK(wave_shape_collapse(early) > late_spread);
  CHECK_THROWS_AS(wave_shape_collapse(std::vector<GridFunction>{r.snapshot(1)}), ConfigError);
}

TEST_CASE("front constancy probe, right Riemann discretisation") {
  const auto config = make_config(0.01, 60.0, 100, Quadrature::RightRiemann);
  const auto gens = all_generations(100);
  const auto r = run_recursion(config, gens);

  SUBCASE("alpha = 0.9855 flattens") {
    const auto series = front_constancy_probe(r, 0.9855);
    REQUIRE(series.size() == 99);
    CHECK(series.front().n == 2);
    CHECK(series.back().n == 100);
    const double last = series.back().value;
    double worst = 0.0;
    for (const auto& p : series)
      if (p.n >= 60) worst = std::max(worst, std::abs(p.value - last));
    CHECK(worst < 0.05);
    CHECK(last > 0.0);
    CHECK(last < 1.0);
  }
  SUBCASE("alpha = 1 drifts downward") {
    const auto series = front_constancy_probe(r, 1.0);
    int rises = 0;
    for (std::size_t i = 1; i < series.size(); ++i)
      if (series[i].n > 50 && series[i].value >= series[i - 1].value) ++rises;
    CHECK(rises == 0);
    CHECK(series.back().value < series[48].value - 0.05);
    CHECK(probe_drift(series) > probe_drift(front_constancy_probe(r, 0.9855)));
  }
  SUBCASE("missing generations are reported") {
    const int sparse[] = {50, 100};
    const auto thin = run_recursion(config, sparse);
    CHECK_THROWS_AS(front_constancy_probe(thin, 0.9855), ConfigError);
  }
}

TEST_CASE("probe that leaves the grid names the generation") {
  const auto config = make_config(0.05, 20.0, 80, Quadrature::RightRiemann);
  const auto r = run_recursion(config, all_generations(80));
  int first_outside = 2;
  while (probe_abscissa(first_outside) <= 20.0) ++first_outside;
  try {
    front_constancy_probe(r, 1.0);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    const std::string expected = "n = " + std::to_string(first_outside) + " ";
    CHECK(std::string(e.what()).find(expected) != std::string::npos);
  }
}

TEST_CASE("streamed probe table matches the snapshot-based probe") {
  const auto config = make_config(0.02, 60.0, 60, Quadrature::RightRiemann);
  ProbeTable table(config, 0.95, 1.01);
  const auto r = run_recursion(config, all_generations(60),
                               [&](const GridFunction& f) { table.record(f); });
  for (double alpha : {0.95, 0.9855, 1.01}) {
    const auto a = table.series(alpha);
    const auto b = front_constancy_probe(r, alpha);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
  }
  CHECK_THROWS_AS(table.series(1.05), ConfigError);
}

TEST_CASE("probe at delta 0.001 with alpha 0.9977 settles") {
  AlphaScanOptions opts;
  const auto config = alpha_scan_config(0.001, 100, opts);
  ProbeTable table(config, 0.9977, 0.9977);
  run_recursion(config, {}, [&](const GridFunction& f) { table.record(f); });
  const auto series = table.series(0.9977);
  double worst = 0.0;
  for (const auto& p : series)
    if (p.n >= 60) worst = std::max(worst, std::abs(p.value - series.back().value));
  CHECK(worst < 0.05);
}

TEST_CASE("probe_drift") {
  std::vector<ProbePoint> flat;
  for (int n = 2; n <= 20; ++n) flat.push_back({n, 0.7});
  CHECK(probe_drift(flat) == 0.0);
  std::vector<ProbePoint> ramp;
  for (int n = 2; n <= 21; ++n) ramp.push_back({n, 0.01 * n});
  CHECK(probe_drift(ramp) == doctest::Approx(0.01));
  CHECK_THROWS_AS(probe_drift(std::vector<ProbePoint>{{2, 0.5}}), NumericError);
}

TEST_CASE("alpha scan on a coarse grid") {
  const double deltas[] = {0.02};
  const auto results = alpha_scan(deltas, 100);
  REQUIRE(results.size() == 1);
  CHECK(results[0].alpha_star > 0.9);
  CHECK(results[0].alpha_star < 1.1);
  CHECK(results[0].probe_series.size() == 99);
  // Looking only at α well below the optimum cannot bracket it.
  AlphaScanOptions narrow;
  narrow.alpha_lo = 0.90;
  narrow.alpha_hi = 0.93;
  CHECK_THROWS_AS(alpha_scan(deltas, 100, narrow), NumericError);
}

TEST_CASE("front CSV writers") {
  const auto dir = std::filesystem::temp_directory_path();
  FrontTrace t;
  t.entries = {{0, 0.5}, {1, 1.25}};
  write_front_trace_csv((dir / "cascade_trace.csv").string(), t);
  auto table = csv::read((dir / "cascade_trace.csv").string());
  CHECK(table.header == std::vector<std::string>{"n", "x_front"});
  CHECK(table.rows.size() == 2);
  CHECK(table.rows[1] == std::vector<std::string>{"1", "1.25"});

  FrontFit fit{0.36, 0.55, 0.9, {500, 2000}, 0.01};
  write_front_fit_csv((dir / "cascade_fit.csv").string(), fit);
  table = csv::read((dir / "cascade_fit.csv").string());
  CHECK(table.header == std::vector<std::string>{"v", "b", "a", "residual_rms", "n_lo", "n_hi"});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][4] == "500");

  AlphaScanResult r;
  r.delta = 0.01;
  r.alpha_star = 0.9855;
  write_alpha_scan_csv((dir / "cascade_alpha.csv").string(), std::vector<AlphaScanResult>{r});
  table = csv::read((dir / "cascade_alpha.csv").string());
  CHECK(table.header == std::vector<std::string>{"delta", "alpha_star"});
  CHECK(std::stod(table.rows[0][1]) == 0.9855);
}
