#pragma once

/**
 * @file simulation.hpp
 * @brief Monte Carlo ground truth for the height distribution.
 *
 * Continuum model: the root sits at 0; a particle at p spawns Poisson(x - p)
 * children uniform on [p, x]. H(x) is the index of the last non-empty
 * generation. Equivalently, this is a branching Poisson process of unit
 * intensity to the right of each parent with everything beyond x killed.
 *
 * Discrete model: vertices 1..n, each edge (i, j) with i < j present
 * independently with probability c. L_n is the longest directed path from
 * vertex 1. With c = x / n, L_n converges in law to H(x).
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade/rng.hpp"

namespace cascade {

struct SimConfig {
  double x = 1.0;
  int trials = 1;
  int n_cap = 50;
  std::size_t particle_cap = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

enum class HeightStatus {
  Resolved,   // tree died out; height is exact
  BeyondCap,  // generation n_cap + 1 was reached; height > n_cap
  Truncated,  // live particles exceeded particle_cap
};

struct HeightSample {
  HeightStatus status = HeightStatus::Resolved;
  int height = 0;  // exact when Resolved, a lower bound otherwise
};

struct ParticleGeneration {
  int generation = 0;
  std::vector<double> positions;  // all within [0, x]
};

/// Offspring of every particle in `parent`, in parent order.
ParticleGeneration next_generation(const ParticleGeneration& parent, double x,
                                   Rng& rng);

HeightSample sample_height(double x, Rng& rng, int n_cap,
                           std::size_t particle_cap);

/// Minimum particle position per generation. When a generation is empty the
/// trace ends with a +infinity entry. Consumes the generator exactly like
/// sample_height with the same arguments.
struct LeftmostTrace {
  std::vector<double> minima;
  bool truncated = false;
};

LeftmostTrace leftmost_trace(double x, Rng& rng, int n_cap,
                             std::size_t particle_cap);

struct EmpiricalCdf {
  double x = 0.0;
  std::int64_t trials = 0;
  std::vector<std::int64_t> counts;  // counts[n]: trials with H(x) <= n, n = 0..n_cap
  std::int64_t beyond_cap = 0;
  std::int64_t truncated = 0;

  int n_cap() const { return static_cast<int>(counts.size()) - 1; }
  double p_hat(int n) const;
  /// Binomial standard error sqrt(p(1-p)/trials).
  double standard_error(int n) const;
};

/// Trial i draws from substream(seed, i); the result is independent of the
/// thread count.
EmpiricalCdf empirical_cdf(const SimConfig& config);

void write_empirical_cdf_csv(const std::string& path, const EmpiricalCdf& cdf);

/// Adjacency lists with 0-based vertex ids; every edge points to a larger id.
struct CascadeGraph {
  int n_vertices = 0;
  std::vector<std::vector<int>> out;
};

/// Draws all n(n-1)/2 candidate edges. Meant for small graphs.
CascadeGraph sample_cascade_edges(int n_vertices, double c, Rng& rng);

/// Longest path from the first vertex by dynamic programming in index order.
int longest_path_from_first(const CascadeGraph& graph);

struct CascadeGraphSample {
  int n_vertices = 0;
  double c = 0.0;
  int longest_path_from_1 = 0;
};

/// L_n for one random cascade graph. Only vertices reachable from vertex 1
/// have their out-edges drawn (geometric gap sampling), so the cost is
/// O(n + reachable edges).
CascadeGraphSample sample_cascade_graph(int n_vertices, double c, Rng& rng);

/// Max vertical distance between the empirical CDFs of two integer samples.
double ks_two_sample(std::span<const int> a, std::span<const int> b);

/// Asymptotic two-sample KS critical value c(α)·sqrt((n+m)/(nm)) with
/// c(α) = sqrt(-ln(α/2)/2).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

struct DiscreteContinuumReport {
  int n_vertices = 0;
  double x = 0.0;
  double c = 0.0;
  int trials = 0;
  std::vector<double> p_discrete;   // P(L_n <= k), k = 0..K
  std::vector<double> p_continuum;  // P(H(x) <= k), k = 0..K
  double ks_statistic = 0.0;
  double ks_critical_1pct = 0.0;
  std::int64_t truncated_continuum = 0;
};

/// Samples `trials` values of L_n with c = x / n_vertices and `trials` values
/// of H(x), and compares their distributions. Discrete trial i uses
/// substream(seed, 2i), continuum trial i substream(seed, 2i + 1).
DiscreteContinuumReport compare_discrete_continuum(
    int n_vertices, double x, int trials, std::uint64_t seed,
    unsigned threads = 0, std::size_t particle_cap = 1'000'000);

/// `n,p_discrete,p_continuum` rows followed by `ks,<statistic>,<critical>`.
void write_comparison_csv(const std::string& path,
                          const DiscreteContinuumReport& report);

/// Empirical CDF `n,count,p_hat,stderr` of an integer sample.
void write_integer_cdf_csv(const std::string& path, std::span<const int> sample);

}  // namespace cascade
