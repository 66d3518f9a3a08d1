#include "cascade/martingale.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cascade/csv.hpp"
#include "cascade/error.hpp"
#include "cascade/front.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

void NormalizedOffspringLaw::validate() const {
  if (!(v_max >= support_lo) || !std::isfinite(v_max))
    throw ConfigError("v_max must be finite and >= -1");
}

double NormalizedOffspringLaw::truncation_bound() const {
  return std::exp(-v_max) * (v_max + 2.0);
}

std::vector<double> sample_normalized_offspring(double parent, Rng& rng,
                                                double v_max) {
  const NormalizedOffspringLaw law{v_max};
  law.validate();
  std::vector<double> children;
  const double mean = law.mean_count();
  if (mean <= 0.0) return children;
  std::poisson_distribution<int> count(mean);
  std::uniform_real_distribution<double> shift(NormalizedOffspringLaw::support_lo, v_max);
  const int k = count(rng);
  children.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) children.push_back(parent + shift(rng));
  return children;
}

double derivative_martingale(std::span<const double> positions) {
  double d = 0.0;
  for (double v : positions) d += v * std::exp(-v);
  return d;
}

MartingaleTrajectory simulate_derivative_martingale(int n, Rng& rng,
                                                    const BrwOptions& options) {
  if (n < 0) throw ConfigError("generation count must be >= 0");
  NormalizedOffspringLaw{options.v_max}.validate();
  if (options.particle_cap < 1) throw ConfigError("particle_cap must be >= 1");

  MartingaleTrajectory traj;
  std::vector<double> live{0.0};
  double frozen_sum = 0.0;
  std::size_t frozen_count = 0;
  traj.values.push_back(derivative_martingale(live));
  traj.generation_sizes.push_back(live.size());
  traj.frozen_sizes.push_back(0);

  for (int k = 1; k <= n; ++k) {
    std::vector<double> next;
    double live_sum = 0.0;
    for (double parent : live) {
      for (double child : sample_normalized_offspring(parent, rng, options.v_max)) {
        const double weight = child * std::exp(-child);
        if (child > options.freeze_level) {
          frozen_sum += weight;
          ++frozen_count;
          if (options.keep_particles) traj.frozen_positions.push_back(child);
        } else {
          live_sum += weight;
          next.push_back(child);
        }
      }
    }
    live = std::move(next);
    if (live.size() > options.particle_cap) {
      traj.truncated = true;
      break;
    }
    traj.generation_sizes.push_back(live.size());
    traj.frozen_sizes.push_back(frozen_count);
    if (live.empty() && frozen_count == 0) {
      traj.survived = false;
      traj.values.resize(static_cast<std::size_t>(n) + 1, 0.0);
      traj.generation_sizes.resize(static_cast<std::size_t>(n) + 1, 0);
      traj.frozen_sizes.resize(static_cast<std::size_t>(n) + 1, 0);
      break;
    }
    traj.values.push_back(frozen_sum + live_sum);
  }
  if (options.keep_particles) traj.live_positions = live;
  return traj;
}

std::vector<MartingaleTrajectory> simulate_trajectories(int n, int trials,
                                                        std::uint64_t seed,
                                                        const BrwOptions& options,
                                                        unsigned threads) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  std::vector<MartingaleTrajectory> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    out[i] = simulate_derivative_martingale(n, rng, options);
  });
  return out;
}

MomentReport verify_boundary_conditions() {
  using boost::math::quadrature::gauss_kronrod;
  MomentReport report;
  // (y² + 2y + 2)e^{-y} dominates the tails of all three integrands.
  report.cutoff = 40.0;
  const double v = report.cutoff;
  report.tail_bound = (v * v + 2.0 * v + 2.0) * std::exp(-v);

  constexpr double kTolerance = 1e-15;
  constexpr unsigned kMaxDepth = 20;
  auto integrate = [&](auto f) {
    double error = 0.0;
    const double value =
        gauss_kronrod<double, 61>::integrate(f, -1.0, v, kMaxDepth, kTolerance, &error);
    if (!(error < 1e-12) || !std::isfinite(value))
      throw NumericError("moment quadrature did not converge (error estimate " +
                         csv::format_double(error) + ")");
    return value;
  };

  const double inv_e = 1.0 / std::numbers::e;
  report.m1_quadrature = inv_e * integrate([](double y) { return std::exp(-y); });
  report.m2_quadrature = inv_e * integrate([](double y) { return y * std::exp(-y); });
  report.second_moment_integral = integrate([](double y) { return y * y * std::exp(-y); });

  report.m1_residual = std::abs(report.m1_quadrature - report.m1_closed_form);
  report.m2_residual = std::abs(report.m2_quadrature - report.m2_closed_form);
  report.m4_value = inv_e * report.second_moment_integral;
  return report;
}

LimitProbeTable equivalence_check(const RecursionResult& recursion,
                                  std::span<const double> z_grid,
                                  std::span<const int> ns) {
  if (recursion.config.delta > 0.001 * (1.0 + 1e-9))
    throw ConfigError("limit probe needs delta <= 0.001");
  if (recursion.config.n_max < 200) throw ConfigError("limit probe needs n_max >= 200");
  if (ns.empty() || z_grid.empty()) throw ConfigError("limit probe needs z values and n values");

  LimitProbeTable table;
  table.ns.assign(ns.begin(), ns.end());
  std::sort(table.ns.begin(), table.ns.end());
  for (int n : table.ns)
    if (n < 2 || n > recursion.config.n_max + 1)
      throw ConfigError("probed n = " + std::to_string(n) + " not covered by the recursion");

  for (double z : z_grid) {
    LimitProbeRow row;
    row.z = z;
    for (int n : table.ns) {
      const double x = z + probe_abscissa(n);
      const auto& f = recursion.snapshot(n - 1);
      if (x < 0.0 || x > f.x_max())
        throw DomainError("limit probe point z = " + csv::format_double(z) +
                          ", n = " + std::to_string(n) + " lies outside the grid");
      row.values.push_back(eval(f, x));
    }
    const auto [lo, hi] = std::minmax_element(row.values.begin(), row.values.end());
    row.spread = *hi - *lo;
    row.limit = row.values.back();
    row.inside_unit_interval = row.limit > 0.0 && row.limit < 1.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_moment_report_csv(const std::string& path, const MomentReport& r) {
  csv::Writer out(path);
  out.header({"m1_residual", "m2_residual", "m4_value", "second_moment_integral",
              "m1_quadrature", "m2_quadrature", "cutoff", "tail_bound"});
  out.row({csv::format_double(r.m1_residual), csv::format_double(r.m2_residual),
           csv::format_double(r.m4_value), csv::format_double(r.second_moment_integral),
           csv::format_double(r.m1_quadrature), csv::format_double(r.m2_quadrature),
           csv::format_double(r.cutoff), csv::format_double(r.tail_bound)});
  out.close();
}

void write_trajectories_csv(const std::string& path,
                            std::span<const MartingaleTrajectory> trajectories) {
  csv::Writer out(path);
  out.header({"trial", "generation", "D", "alive_count", "truncated"});
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    const auto& traj = trajectories[t];
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
      const std::size_t alive = traj.generation_sizes[k] + traj.frozen_sizes[k];
      out.row({csv::format_int(static_cast<std::int64_t>(t)),
               csv::format_int(static_cast<std::int64_t>(k)),
               csv::format_double(traj.values[k]),
               csv::format_int(static_cast<std::int64_t>(alive)),
               traj.truncated ? "1" : "0"});
    }
  }
  out.close();
}

void write_limit_probe_csv(const std::string& path, const LimitProbeTable& table) {
  csv::Writer out(path);
  out.header({"z", "n", "p"});
  for (const auto& row : table.rows)
    for (std::size_t i = 0; i < table.ns.size(); ++i)
      out.row({csv::format_double(row.z), csv::format_int(table.ns[i]),
               csv::format_double(row.values[i])});
  out.close();
}

}  // namespace cascade
