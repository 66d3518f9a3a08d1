#pragma once

/**
 * @file recursion.hpp
 * @brief Height distribution of the continuum cascade model on a uniform grid.
 *
 * P_n(x) = P(H(x) <= n) obeys
 *
 *     P_0(x) = exp(-x),
 *     P_n(x) = exp(-x + ∫_0^x P_{n-1}(y) dy)   (n >= 1).
 *
 * Since x = ∫_0^x 1 dy, the exponent equals -∫_0^x (1 - P_{n-1}(y)) dy. The
 * implementation integrates the complement 1 - P, which stays accurate where
 * P rounds to 1 behind the front; the P-form loses that tail to cancellation.
 *
 * Two quadratures are offered:
 *   - RightRiemann: right-endpoint sum over nodes 1..i (the node at y = 0 is
 *     omitted), the classic discretisation that the α-probe values refer to.
 *   - Trapezoid: second-order accurate, the default for analysis.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascade {

enum class Quadrature { RightRiemann, Trapezoid };

std::string_view to_string(Quadrature q);
/// Accepts "riemann", "right-riemann" and "trapezoid" (case-sensitive).
Quadrature parse_quadrature(std::string_view name);

struct RecursionConfig {
  double delta = 0.01;
  double x_max = 50.0;
  int n_max = 100;
  Quadrature quadrature = Quadrature::Trapezoid;

  /// Number of intervals M = floor(x_max / delta); the grid has M + 1 nodes.
  std::size_t intervals() const;
  std::size_t nodes() const { return intervals() + 1; }

  /// Throws ConfigError unless delta > 0, x_max >= delta, n_max >= 0.
  void validate() const;
};

/// Smallest x_max for which the level-1/2 front stays well clear of the
/// right boundary up to generation n_max: n_max/e + 10·max(1, ln n_max).
double minimum_front_x_max(int n_max);

/// Throws ConfigError if config.x_max < minimum_front_x_max(config.n_max).
void require_front_margin(const RecursionConfig& config);

/// Sampled P_n on x = 0, delta, 2·delta, ... together with its complement
/// 1 - P_n (kept separately so that tiny complements are not rounded away).
///
/// Values are immutable after construction; instances may be shared across
/// threads read-only.
class GridFunction {
 public:
  GridFunction(double delta, int generation, std::vector<double> values,
               std::vector<double> complement);

  /// Builds from P values only; the complement is 1 - P.
  static GridFunction from_values(double delta, int generation,
                                  std::vector<double> values);

  double delta() const { return delta_; }
  int generation() const { return generation_; }
  std::size_t size() const { return values_.size(); }
  double x_max() const { return delta_ * static_cast<double>(size() - 1); }
  double x_at(std::size_t i) const { return delta_ * static_cast<double>(i); }

  std::span<const double> values() const { return values_; }
  std::span<const double> complement() const { return complement_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Throws NumericError if a value leaves [0, 1] or the curve increases in x.
  void check_invariants() const;

 private:
  double delta_;
  int generation_;
  std::vector<double> values_;
  std::vector<double> complement_;
};

struct RecursionResult {
  RecursionConfig config;
  std::vector<GridFunction> snapshots;  // ordered by generation
  GridFunction final;

  /// Snapshot for generation n; throws ConfigError when it was not retained.
  const GridFunction& snapshot(int n) const;
};

/// Called once per generation 0..n_max with the freshly computed curve.
using GenerationObserver = std::function<void(const GridFunction&)>;

GridFunction init_p0(const RecursionConfig& config);

/// One application of the recursion map. Runs in O(M) with a single
/// compensated running sum.
GridFunction iterate_step(const GridFunction& prev,
                          const RecursionConfig& config);

/// Iterates from P_0 to P_{n_max}, keeping only the requested snapshots and
/// the rolling previous/current pair.
RecursionResult run_recursion(const RecursionConfig& config,
                              std::span<const int> snapshot_generations = {},
                              const GenerationObserver& observer = {});

/// Linear interpolation between adjacent grid values; DomainError outside
/// [0, x_max].
double eval(const GridFunction& f, double x);

/// Exact P_1(x) = exp(1 - x - e^{-x}).
double closed_form_p1(double x);

/// Writes `x,p` rows at 17 significant digits.
void write_snapshot_csv(const std::string& path, const GridFunction& f);

}  // namespace cascade
