#pragma once

/**
 * @file front.hpp
 * @brief Traveling-wave measurements on recursion output.
 *
 * The front x_f(n) is the x at which P_n crosses a fixed level (1/2 unless
 * stated otherwise). Its expected asymptotics are
 *
 *     x_f(n) = n/e + (3 / 2e)·ln n + O(1).
 *
 * This header provides front extraction, velocity and logarithmic-correction
 * fits, wave-shape collapse, and the α-probe f_{n-1}(α·(n/e + (3/2e) ln n))
 * together with the scan that picks the α making that probe flat.
 */

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/recursion.hpp"

namespace cascade {

/// (3 / 2e), the coefficient of ln n in the front position.
inline constexpr double kLogCorrection = 1.5 / std::numbers::e;

struct FrontPoint {
  int n;
  double x;
};

struct FrontTrace {
  double level = 0.5;
  std::vector<FrontPoint> entries;  // ordered by n

  /// Front position at generation n; FitError if absent.
  double at(int n) const;
};

/// Inclusive generation range used by a fit.
struct FitWindow {
  int lo;
  int hi;
};

struct FrontFit {
  double v = 0.0;
  double b = 0.0;
  double a = 0.0;
  FitWindow window{0, 0};
  double residual_rms = 0.0;
};

/// Linearly interpolated x where f crosses `level`. Throws FrontNotFound when
/// the level is not bracketed on the grid.
double front_position(const GridFunction& f, double level = 0.5);

/// Runs the recursion and records the front at every generation. Requires
/// the config to leave room for the front (see require_front_margin).
FrontTrace trace_fronts(const RecursionConfig& config, double level = 0.5);

/// Same, for several levels in one recursion pass.
std::vector<FrontTrace> trace_fronts(const RecursionConfig& config,
                                     std::span<const double> levels);

/// Least-squares slope of x_f against n over the window (b is fixed to 0).
/// Needs at least 10 entries in the window.
FrontFit velocity_estimate(const FrontTrace& trace, FitWindow window);

/// Velocity with the 1/n bias of windowed slopes removed: slopes over
/// [lo, m] and [m, hi] with m the geometric midpoint are combined as
/// (m·v_hi - lo·v_lo) / (m - lo).
double richardson_velocity(const FrontTrace& trace, FitWindow window);

/// Fits x_f(n) - v·n = a + b·ln n. With v_fixed absent the velocity is fitted
/// jointly with regressors {n, ln n, 1}. The window must hold at least 50
/// entries and span a factor of 3 in n.
FrontFit log_correction_fit(const FrontTrace& trace, FitWindow window,
                            std::optional<double> v_fixed = std::nullopt);

/// Largest pointwise spread between snapshots after shifting each by its
/// front, sampled on u = x - x_f in [-5, 5]. P is taken as 1 for x < 0
/// (an empty interval has height 0).
double wave_shape_collapse(std::span<const GridFunction> snapshots,
                           double level = 0.5);

struct ProbePoint {
  int n;
  double value;
};

/// n/e + (3/2e)·ln n.
double probe_abscissa(int n);

/**
 * Stores, for each n = 2..n_max, the part of f_{n-1} needed to evaluate the
 * probe f_{n-1}(α·probe_abscissa(n)) for α in [alpha_lo, alpha_hi]. Memory is
 * O(n_max · window) instead of O(n_max · M).
 */
class ProbeTable {
 public:
  ProbeTable(const RecursionConfig& config, double alpha_lo, double alpha_hi);

  /// Observer-compatible: feed every generation in order.
  void record(const GridFunction& f);

  /// Builds from a result that retained generations 1..n_max-1.
  static ProbeTable from_result(const RecursionResult& result, double alpha_lo,
                                double alpha_hi);

  /// Probe series for n = 2..n_max. DomainError names the first n whose
  /// probe point leaves the grid or the recorded window.
  std::vector<ProbePoint> series(double alpha) const;

  int n_max() const { return n_max_; }

 private:
  struct Slice {
    std::size_t first = 0;
    std::vector<double> values;
  };

  double delta_;
  std::size_t nodes_;
  int n_max_;
  double alpha_lo_;
  double alpha_hi_;
  std::vector<Slice> slices_;  // slices_[k] holds generation k
};

/// f_{n-1}(α·(n/e + (3/2e) ln n)) for n = 2..n_max. `result` must retain
/// every generation 1..n_max-1.
std::vector<ProbePoint> front_constancy_probe(const RecursionResult& result,
                                              double alpha);

/// RMS of successive differences over the last half of the series.
double probe_drift(std::span<const ProbePoint> series);

struct AlphaScanOptions {
  double alpha_lo = 0.95;
  double alpha_hi = 1.01;
  double tolerance = 1e-7;
  Quadrature quadrature = Quadrature::RightRiemann;
};

struct AlphaScanResult {
  double delta = 0.0;
  double alpha_star = 0.0;
  double drift = 0.0;
  std::vector<ProbePoint> probe_series;
};

/// For each delta, the α in [alpha_lo, alpha_hi] minimising probe_drift,
/// found by golden-section search. NumericError if the minimum sits on the
/// bracket boundary.
std::vector<AlphaScanResult> alpha_scan(std::span<const double> deltas,
                                        int n_max,
                                        const AlphaScanOptions& options = {});

/// Recursion config used by alpha_scan for one grid spacing.
RecursionConfig alpha_scan_config(double delta, int n_max,
                                  const AlphaScanOptions& options = {});

void write_front_trace_csv(const std::string& path, const FrontTrace& trace);
void write_front_fit_csv(const std::string& path, const FrontFit& fit);
void write_alpha_scan_csv(const std::string& path,
                          std::span<const AlphaScanResult> results);

}  // namespace cascade
