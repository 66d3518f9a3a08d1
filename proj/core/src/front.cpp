#include "cascade/front.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "cascade/csv.hpp"
#include "cascade/error.hpp"

namespace cascade {

namespace {

std::vector<FrontPoint> window_entries(const FrontTrace& trace, FitWindow window) {
  if (window.lo > window.hi) throw FitError("fit window is empty (lo > hi)");
  std::vector<FrontPoint> pts;
  for (const auto& e : trace.entries)
    if (e.n >= window.lo && e.n <= window.hi) pts.push_back(e);
  return pts;
}

double golden_section_minimize(const auto& objective, double lo, double hi,
                               double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double FrontTrace::at(int n) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [n](const FrontPoint& p) { return p.n == n; });
  if (it == entries.end())
    throw FitError("front trace has no entry for n = " + std::to_string(n));
  return it->x;
}

double front_position(const GridFunction& f, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("front level must lie in (0, 1)");
  const auto v = f.values();
  // First node strictly below the level; P is non-increasing.
  const auto it = std::partition_point(v.begin(), v.end(),
                                       [level](double p) { return p >= level; });
  if (it == v.begin() || it == v.end())
    throw FrontNotFound("level " + csv::format_double(level) +
                        " not crossed by P_" + std::to_string(f.generation()) +
                        " on [0, " + csv::format_double(f.x_max()) + "]");
  const auto i = static_cast<std::size_t>(it - v.begin());
  const double hi = v[i - 1];
  const double lo = v[i];
  return f.x_at(i - 1) + (hi - level) / (hi - lo) * f.delta();
}

std::vector<FrontTrace> trace_fronts(const RecursionConfig& config,
                                     std::span<const double> levels) {
  config.validate();
  require_front_margin(config);
  std::vector<FrontTrace> traces;
  for (double level : levels) {
    FrontTrace t;
    t.level = level;
    t.entries.reserve(static_cast<std::size_t>(config.n_max) + 1);
    traces.push_back(std::move(t));
  }
  run_recursion(config, {}, [&](const GridFunction& f) {
    for (auto& t : traces)
      t.entries.push_back({f.generation(), front_position(f, t.level)});
  });
  return traces;
}

FrontTrace trace_fronts(const RecursionConfig& config, double level) {
  const double levels[] = {level};
  return std::move(trace_fronts(config, levels).front());
}

FrontFit velocity_estimate(const FrontTrace& trace, FitWindow window) {
  const auto pts = window_entries(trace, window);
  if (pts.size() < 10)
    throw FitError("velocity fit needs >= 10 entries, window has " +
                   std::to_string(pts.size()));
  const double count = static_cast<double>(pts.size());
  double mean_n = 0.0;
  double mean_x = 0.0;
  for (const auto& p : pts) {
    mean_n += p.n;
    mean_x += p.x;
  }
  mean_n /= count;
  mean_x /= count;
  double snn = 0.0;
  double snx = 0.0;
  for (const auto& p : pts) {
    const double dn = p.n - mean_n;
    snn += dn * dn;
    snx += dn * (p.x - mean_x);
  }
  FrontFit fit;
  fit.v = snx / snn;
  fit.b = 0.0;
  fit.a = mean_x - fit.v * mean_n;
  fit.window = window;
  double ss = 0.0;
  for (const auto& p : pts) {
    const double r = p.x - (fit.a + fit.v * p.n);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / count);
  return fit;
}

double richardson_velocity(const FrontTrace& trace, FitWindow window) {
  if (window.lo < 1 || window.hi <= window.lo)
    throw FitError("Richardson velocity needs 1 <= lo < hi");
  const int mid = static_cast<int>(std::lround(
      std::sqrt(static_cast<double>(window.lo) * static_cast<double>(window.hi))));
  if (mid <= window.lo || mid >= window.hi)
    throw FitError("Richardson velocity window too narrow to split");
  const double v_low = velocity_estimate(trace, {window.lo, mid}).v;
  const double v_high = velocity_estimate(trace, {mid, window.hi}).v;
  return (mid * v_high - window.lo * v_low) / static_cast<double>(mid - window.lo);
}

FrontFit log_correction_fit(const FrontTrace& trace, FitWindow window,
                            std::optional<double> v_fixed) {
  const auto pts = window_entries(trace, window);
  if (pts.size() < 50)
    throw FitError("log-correction fit needs >= 50 entries, window has " +
                   std::to_string(pts.size()));
  const int n_first = pts.front().n;
  const int n_last = pts.back().n;
  if (n_first < 1 || n_last < 3 * n_first)
    throw FitError("log-correction window must span a factor of 3 in n (n >= 1)");

  const auto rows = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index cols = v_fixed ? 2 : 3;
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& p = pts[static_cast<std::size_t>(r)];
    const double n = p.n;
    design(r, 0) = std::log(n);
    design(r, 1) = 1.0;
    if (v_fixed) {
      rhs(r) = p.x - *v_fixed * n;
    } else {
      design(r, 2) = n;
      rhs(r) = p.x;
    }
  }

  // Column equilibration before judging conditioning.
  const Eigen::VectorXd scale = design.colwise().norm().transpose();
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!std::isfinite(cond) || cond > 1e10)
    throw FitError("log-correction design is ill-conditioned (cond = " +
                   csv::format_double(cond) + ")");

  const Eigen::VectorXd coef_scaled = scaled.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd coef = coef_scaled.cwiseQuotient(scale);

  FrontFit fit;
  fit.b = coef(0);
  fit.a = coef(1);
  fit.v = v_fixed ? *v_fixed : coef(2);
  fit.window = window;
  const Eigen::VectorXd residual = design * coef - rhs;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
  return fit;
}

double wave_shape_collapse(std::span<const GridFunction> snapshots, double level) {
  if (snapshots.size() < 2)
    throw ConfigError("wave-shape collapse needs at least two snapshots");
  double step = std::numeric_limits<double>::infinity();
  std::vector<double> fronts;
  fronts.reserve(snapshots.size());
  for (const auto& f : snapshots) {
    fronts.push_back(front_position(f, level));
    step = std::min(step, f.delta());
  }
  constexpr double kHalfWidth = 5.0;
  const auto samples = static_cast<int>(std::lround(2.0 * kHalfWidth / step));
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double u = -kHalfWidth + k * step;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
      const double x = fronts[s] + u;
      const double p = x < 0.0 ? 1.0 : eval(snapshots[s], x);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double probe_abscissa(int n) {
  const double nn = static_cast<double>(n);
  return nn / std::numbers::e + kLogCorrection * std::log(nn);
}

ProbeTable::ProbeTable(const RecursionConfig& config, double alpha_lo,
                       double alpha_hi)
    : delta_(config.delta),
      nodes_(config.nodes()),
      n_max_(config.n_max),
      alpha_lo_(alpha_lo),
      alpha_hi_(alpha_hi),
      slices_(static_cast<std::size_t>(std::max(config.n_max, 1))) {
  config.validate();
  if (!(alpha_lo > 0.0 && alpha_lo <= alpha_hi))
    throw ConfigError("probe α range must satisfy 0 < lo <= hi");
}

void ProbeTable::record(const GridFunction& f) {
  const int k = f.generation();
  if (k < 1 || k >= n_max_) return;
  if (f.delta() != delta_ || f.size() != nodes_)
    throw ContractError("probe table fed a curve from a different grid");
  const double c = probe_abscissa(k + 1);
  const auto last_node = static_cast<double>(nodes_ - 1);
  const auto first = static_cast<std::size_t>(
      std::clamp(std::floor(alpha_lo_ * c / delta_) - 1.0, 0.0, last_node));
  const auto last = static_cast<std::size_t>(
      std::clamp(std::ceil(alpha_hi_ * c / delta_) + 1.0, 0.0, last_node));
  auto& slice = slices_[static_cast<std::size_t>(k)];
  slice.first = first;
  const auto v = f.values();
  slice.values.assign(v.begin() + static_cast<std::ptrdiff_t>(first),
                      v.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

ProbeTable ProbeTable::from_result(const RecursionResult& result,
                                   double alpha_lo, double alpha_hi) {
  ProbeTable table(result.config, alpha_lo, alpha_hi);
  for (int k = 1; k < result.config.n_max; ++k) table.record(result.snapshot(k));
  return table;
}

std::vector<ProbePoint> ProbeTable::series(double alpha) const {
  if (alpha < alpha_lo_ || alpha > alpha_hi_)
    throw ConfigError("α = " + csv::format_double(alpha) +
                      " outside the recorded probe range");
  const double x_max = delta_ * static_cast<double>(nodes_ - 1);
  std::vector<ProbePoint> out;
  for (int n = 2; n <= n_max_; ++n) {
    const double x = alpha * probe_abscissa(n);
    const auto& slice = slices_[static_cast<std::size_t>(n - 1)];
    if (x > x_max)
      throw DomainError("probe point for n = " + std::to_string(n) +
                        " exits the grid (x = " + csv::format_double(x) + ")");
    if (slice.values.size() < 2)
      throw DomainError("generation " + std::to_string(n - 1) +
                        " was not recorded for the probe");
    const double s = x / delta_ - static_cast<double>(slice.first);
    if (s < 0.0 || s > static_cast<double>(slice.values.size() - 1))
      throw DomainError("probe point for n = " + std::to_string(n) +
                        " lies outside the recorded window");
    const auto i = std::min(static_cast<std::size_t>(s), slice.values.size() - 2);
    const double t = s - static_cast<double>(i);
    out.push_back({n, (1.0 - t) * slice.values[i] + t * slice.values[i + 1]});
  }
  return out;
}

std::vector<ProbePoint> front_constancy_probe(const RecursionResult& result,
                                              double alpha) {
  return ProbeTable::from_result(result, alpha, alpha).series(alpha);
}

double probe_drift(std::span<const ProbePoint> series) {
  const std::size_t start = series.size() / 2;
  if (series.size() - start < 2)
    throw NumericError("probe series too short to measure drift");
  double ss = 0.0;
  for (std::size_t i = start + 1; i < series.size(); ++i) {
    const double d = series[i].value - series[i - 1].value;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(series.size() - start - 1));
}

RecursionConfig alpha_scan_config(double delta, int n_max,
                                  const AlphaScanOptions& options) {
  RecursionConfig config;
  config.delta = delta;
  config.n_max = n_max;
  config.quadrature = options.quadrature;
  config.x_max = std::max(minimum_front_x_max(n_max),
                          options.alpha_hi * probe_abscissa(n_max) + 10.0);
  return config;
}

std::vector<AlphaScanResult> alpha_scan(std::span<const double> deltas, int n_max,
                                        const AlphaScanOptions& options) {
  if (n_max < 8) throw ConfigError("alpha scan needs n_max >= 8");
  if (!(options.alpha_lo < options.alpha_hi))
    throw ConfigError("alpha scan range is empty");
  std::vector<AlphaScanResult> results;
  for (double delta : deltas) {
    const RecursionConfig config = alpha_scan_config(delta, n_max, options);
    ProbeTable table(config, options.alpha_lo, options.alpha_hi);
    run_recursion(config, {}, [&](const GridFunction& f) { table.record(f); });

    auto objective = [&](double alpha) { return probe_drift(table.series(alpha)); };
    const double alpha_star = golden_section_minimize(
        objective, options.alpha_lo, options.alpha_hi, options.tolerance);
    const double edge = 1e-3 * (options.alpha_hi - options.alpha_lo);
    if (alpha_star - options.alpha_lo < edge || options.alpha_hi - alpha_star < edge)
      throw NumericError("alpha scan for delta = " + csv::format_double(delta) +
                         " did not bracket a minimum (α* = " +
                         csv::format_double(alpha_star) + ")");
    AlphaScanResult r;
    r.delta = delta;
    r.alpha_star = alpha_star;
    r.probe_series = table.series(alpha_star);
    r.drift = probe_drift(r.probe_series);
    results.push_back(std::move(r));
  }
  return results;
}

void write_front_trace_csv(const std::string& path, const FrontTrace& trace) {
  csv::Writer out(path);
  out.header({"n", "x_front"});
  for (const auto& e : trace.entries)
    out.row({csv::format_int(e.n), csv::format_double(e.x)});
  out.close();
}

void write_front_fit_csv(const std::string& path, const FrontFit& fit) {
  csv::Writer out(path);
  out.header({"v", "b", "a", "residual_rms", "n_lo", "n_hi"});
  out.row({csv::format_double(fit.v), csv::format_double(fit.b),
           csv::format_double(fit.a), csv::format_double(fit.residual_rms),
           csv::format_int(fit.window.lo), csv::format_int(fit.window.hi)});
  out.close();
}

void write_alpha_scan_csv(const std::string& path,
                          std::span<const AlphaScanResult> results) {
  csv::Writer out(path);
  out.header({"delta", "alpha_star"});
  for (const auto& r : results)
    out.row({csv::format_double(r.delta), csv::format_double(r.alpha_star)});
  out.close();
}

}  // namespace cascade
