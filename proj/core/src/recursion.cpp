#include "cascade/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cascade/csv.hpp"
#include "cascade/error.hpp"
#include "compensated_sum.hpp"

namespace cascade {

std::string_view to_string(Quadrature q) {
  switch (q) {
    case Quadrature::RightRiemann:
      return "riemann";
    case Quadrature::Trapezoid:
      return "trapezoid";
  }
  return "unknown";
}

Quadrature parse_quadrature(std::string_view name) {
  if (name == "riemann" || name == "right-riemann")
    return Quadrature::RightRiemann;
  if (name == "trapezoid") return Quadrature::Trapezoid;
  throw ConfigError("unknown quadrature '" + std::string(name) +
                    "' (expected 'riemann' or 'trapezoid')");
}

std::size_t RecursionConfig::intervals() const {
  return static_cast<std::size_t>(std::floor(x_max / delta + 1e-9));
}

void RecursionConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("delta must be positive and finite");
  if (!(x_max >= delta) || !std::isfinite(x_max))
    throw ConfigError("x_max must be finite and at least delta");
  if (n_max < 0) throw ConfigError("n_max must be non-negative");
  if (intervals() < 1) throw ConfigError("grid must contain at least one interval");
}

double minimum_front_x_max(int n_max) {
  const double n = static_cast<double>(std::max(n_max, 1));
  return n / std::numbers::e + 10.0 * std::max(1.0, std::log(n));
}

void require_front_margin(const RecursionConfig& config) {
  const double need = minimum_front_x_max(config.n_max);
  if (config.x_max < need)
    throw ConfigError("x_max = " + csv::format_double(config.x_max) +
                      " too small for front measurement up to n_max = " +
                      std::to_string(config.n_max) + " (need >= " +
                      csv::format_double(need) + ")");
}

GridFunction::GridFunction(double delta, int generation,
                           std::vector<double> values,
                           std::vector<double> complement)
    : delta_(delta),
      generation_(generation),
      values_(std::move(values)),
      complement_(std::move(complement)) {
  if (values_.size() != complement_.size())
    throw ContractError("values and complement differ in length");
  if (values_.size() < 2) throw ContractError("grid function needs >= 2 nodes");
}

GridFunction GridFunction::from_values(double delta, int generation,
                                       std::vector<double> values) {
  std::vector<double> complement(values.size());
  std::transform(values.begin(), values.end(), complement.begin(),
                 [](double p) { return 1.0 - p; });
  return GridFunction(delta, generation, std::move(values),
                      std::move(complement));
}

void GridFunction::check_invariants() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double p = values_[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw NumericError("P_" + std::to_string(generation_) +
                         " leaves [0,1] at node " + std::to_string(i));
    if (i > 0 && p > values_[i - 1])
      throw NumericError("P_" + std::to_string(generation_) +
                         " increases at node " + std::to_string(i));
  }
}

const GridFunction& RecursionResult::snapshot(int n) const {
  auto it = std::find_if(snapshots.begin(), snapshots.end(),
                         [n](const GridFunction& f) { return f.generation() == n; });
  if (it == snapshots.end())
    throw ConfigError("generation " + std::to_string(n) + " was not retained");
  return *it;
}

GridFunction init_p0(const RecursionConfig& config) {
  config.validate();
  const std::size_t nodes = config.nodes();
  std::vector<double> p(nodes);
  std::vector<double> q(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = static_cast<double>(i) * config.delta;
    p[i] = std::exp(-x);
    q[i] = -std::expm1(-x);
  }
  return GridFunction(config.delta, 0, std::move(p), std::move(q));
}

GridFunction iterate_step(const GridFunction& prev,
                          const RecursionConfig& config) {
  if (prev.delta() != config.delta)
    throw ContractError("grid spacing of previous generation does not match config");
  if (prev.size() != config.nodes())
    throw ContractError("grid length of previous generation does not match config");

  const auto q_prev = prev.complement();
  const double delta = config.delta;
  const std::size_t nodes = prev.size();
  std::vector<double> p(nodes);
  std::vector<double> q(nodes);

  // R(x) = ∫_0^x (1 - P_{n-1}); P_n = exp(-R).
  // The compensated value can wobble by an ulp; R is non-decreasing.
  detail::CompensatedSum exponent;
  double r = 0.0;
  p[0] = 1.0;
  q[0] = 0.0;
  if (config.quadrature == Quadrature::RightRiemann) {
    for (std::size_t i = 1; i < nodes; ++i) {
      exponent.add(delta * q_prev[i]);
      r = std::max(r, exponent.value());
      p[i] = std::exp(-r);
      q[i] = -std::expm1(-r);
    }
  } else {
    for (std::size_t i = 1; i < nodes; ++i) {
      exponent.add(0.5 * delta * (q_prev[i - 1] + q_prev[i]));
      r = std::max(r, exponent.value());
      p[i] = std::exp(-r);
      q[i] = -std::expm1(-r);
    }
  }
  GridFunction next(delta, prev.generation() + 1, std::move(p), std::move(q));
  next.check_invariants();
  return next;
}

RecursionResult run_recursion(const RecursionConfig& config,
                              std::span<const int> snapshot_generations,
                              const GenerationObserver& observer) {
  config.validate();
  std::vector<int> wanted(snapshot_generations.begin(), snapshot_generations.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  for (int n : wanted) {
    if (n < 0 || n > config.n_max)
      throw ConfigError("snapshot generation " + std::to_string(n) +
                        " outside [0, " + std::to_string(config.n_max) + "]");
  }

  std::vector<GridFunction> snapshots;
  snapshots.reserve(wanted.size());
  auto next_wanted = wanted.begin();

  GridFunction current = init_p0(config);
  auto visit = [&](const GridFunction& f) {
    if (observer) observer(f);
    if (next_wanted != wanted.end() && *next_wanted == f.generation()) {
      snapshots.push_back(f);
      ++next_wanted;
    }
  };
  visit(current);
  for (int n = 1; n <= config.n_max; ++n) {
    current = iterate_step(current, config);
    visit(current);
  }
  return RecursionResult{config, std::move(snapshots), std::move(current)};
}

double eval(const GridFunction& f, double x) {
  const double x_max = f.x_max();
  const double slack = 1e-12 * std::max(1.0, x_max);
  if (!(x >= -slack && x <= x_max + slack))
    throw DomainError("x = " + csv::format_double(x) + " outside [0, " +
                      csv::format_double(x_max) + "]");
  const double s = std::clamp(x / f.delta(), 0.0, static_cast<double>(f.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(s), f.size() - 2);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * f[i] + t * f[i + 1];
}

double closed_form_p1(double x) {
  if (!(x >= 0.0)) throw DomainError("closed_form_p1 requires x >= 0");
  return std::exp(1.0 - x - std::exp(-x));
}

void write_snapshot_csv(const std::string& path, const GridFunction& f) {
  csv::Writer out(path);
  out.header({"x", "p"});
  for (std::size_t i = 0; i < f.size(); ++i)
    out.row({csv::format_double(f.x_at(i)), csv::format_double(f[i])});
  out.close();
}

}  // namespace cascade
