#pragma once

/**
 * @file martingale.hpp
 * @brief Boundary-case branching random walk behind the height distribution.
 *
 * Recentring the killed branching Poisson process (H_n -> e·H_n - n) turns the
 * offspring law into a Poisson point process of intensity 1/e on [-1, ∞).
 * That law satisfies E[Σ e^{-V}] = 1 and E[Σ V e^{-V}] = 0, and the derivative
 * martingale D_n = Σ_{|u|=n} V(u) e^{-V(u)} converges to a limit that is
 * positive on survival. The limit law then predicts that
 * P_{n-1}(z + n/e + (3/2e) ln n) converges to a value strictly inside (0, 1).
 */

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cascade/recursion.hpp"
#include "cascade/rng.hpp"

namespace cascade {

struct NormalizedOffspringLaw {
  static constexpr double intensity = 1.0 / std::numbers::e;
  static constexpr double support_lo = -1.0;
  double v_max = 20.0;  // displacement cutoff used in simulation

  void validate() const;
  /// Mean number of children, (v_max + 1) / e.
  double mean_count() const { return (v_max - support_lo) * intensity; }
  /// Bound e^{-v_max}(v_max + 2) on the weight discarded by the cutoff.
  double truncation_bound() const;
};

/// parent + displacements, N ~ Poisson((v_max + 1)/e) displacements uniform on
/// [-1, v_max].
std::vector<double> sample_normalized_offspring(double parent, Rng& rng,
                                                double v_max);

/// Σ V e^{-V}, summed left to right.
double derivative_martingale(std::span<const double> positions);

struct BrwOptions {
  double v_max = 20.0;
  std::size_t particle_cap = 1'000'000;
  /// Particles born above this position stop branching and keep contributing
  /// V e^{-V}, their subtree's conditional expected contribution.
  double freeze_level = 8.0;
  /// Retain final live and frozen positions in the trajectory.
  bool keep_particles = false;
};

struct MartingaleTrajectory {
  std::vector<double> values;                 // D_0 .. D_n (shorter if truncated)
  std::vector<std::size_t> generation_sizes;  // live (branching) particles per generation
  std::vector<std::size_t> frozen_sizes;      // cumulative frozen particles per generation
  bool survived = true;
  bool truncated = false;
  std::vector<double> live_positions;    // with keep_particles
  std::vector<double> frozen_positions;  // with keep_particles, in freezing order
};

MartingaleTrajectory simulate_derivative_martingale(int n, Rng& rng,
                                                    const BrwOptions& options = {});

/// Trial i uses substream(seed, i).
std::vector<MartingaleTrajectory> simulate_trajectories(int n, int trials,
                                                        std::uint64_t seed,
                                                        const BrwOptions& options = {},
                                                        unsigned threads = 0);

struct MomentReport {
  double m1_closed_form = 1.0;   // (1/e)∫ e^{-y} over [-1, ∞)
  double m2_closed_form = 0.0;   // (1/e)∫ y e^{-y}
  double second_moment_integral_closed_form = std::numbers::e;  // ∫ y² e^{-y}
  double m1_quadrature = 0.0;
  double m2_quadrature = 0.0;
  double second_moment_integral = 0.0;  // by quadrature
  double m1_residual = 0.0;  // |E[Σ e^{-V}] - 1|
  double m2_residual = 0.0;  // |E[Σ V e^{-V}]|
  double m4_value = 0.0;     // E[Σ V² e^{-V}] = second_moment_integral / e
  double cutoff = 0.0;       // quadrature upper limit
  double tail_bound = 0.0;   // bound on the neglected tail of all three integrals
};

/// Closed forms and adaptive Gauss–Kronrod quadrature on [-1, cutoff].
/// NumericError if the quadrature error estimate exceeds 1e-12.
MomentReport verify_boundary_conditions();

struct LimitProbeRow {
  double z = 0.0;
  std::vector<double> values;  // one per probed n
  double spread = 0.0;
  double limit = 0.0;          // value at the largest n
  bool inside_unit_interval = false;
};

struct LimitProbeTable {
  std::vector<int> ns;
  std::vector<LimitProbeRow> rows;
};

/// Tabulates P_{n-1}(z + n/e + (3/2e) ln n). `recursion` must have delta <=
/// 0.001, n_max >= 200 and retain generation n-1 for every probed n.
LimitProbeTable equivalence_check(const RecursionResult& recursion,
                                  std::span<const double> z_grid,
                                  std::span<const int> ns);

void write_moment_report_csv(const std::string& path, const MomentReport& report);
void write_trajectories_csv(const std::string& path,
                            std::span<const MartingaleTrajectory> trajectories);
/// Long format `z,n,p`.
void write_limit_probe_csv(const std::string& path, const LimitProbeTable& table);

}  // namespace cascade
