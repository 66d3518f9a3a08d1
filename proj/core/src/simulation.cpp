#include "cascade/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/csv.hpp"
#include "cascade/error.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

void SimConfig::validate() const {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("x must be finite and >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n_cap < 0) throw ConfigError("n_cap must be >= 0");
  if (particle_cap < 1) throw ConfigError("particle_cap must be >= 1");
}

ParticleGeneration next_generation(const ParticleGeneration& parent, double x,
                                   Rng& rng) {
  ParticleGeneration child;
  child.generation = parent.generation + 1;
  for (double p : parent.positions) {
    const double room = x - p;
    if (room <= 0.0) continue;
    std::poisson_distribution<int> count(room);
    std::uniform_real_distribution<double> place(p, x);
    const int k = count(rng);
    for (int i = 0; i < k; ++i) child.positions.push_back(place(rng));
  }
  return child;
}

namespace {

// Walks generations until extinction, n_cap + 1, or the particle cap.
template <class Visit>
HeightSample grow(double x, Rng& rng, int n_cap, std::size_t particle_cap,
                  Visit&& visit) {
  ParticleGeneration current{0, {0.0}};
  visit(current);
  while (true) {
    ParticleGeneration next = next_generation(current, x, rng);
    visit(next);
    if (next.positions.empty()) return {HeightStatus::Resolved, current.generation};
    if (next.generation > n_cap) return {HeightStatus::BeyondCap, next.generation};
    if (next.positions.size() > particle_cap)
      return {HeightStatus::Truncated, next.generation};
    current = std::move(next);
  }
}

}  // namespace

HeightSample sample_height(double x, Rng& rng, int n_cap,
                           std::size_t particle_cap) {
  if (!(x >= 0.0)) throw ConfigError("x must be >= 0");
  return grow(x, rng, n_cap, particle_cap, [](const ParticleGeneration&) {});
}

LeftmostTrace leftmost_trace(double x, Rng& rng, int n_cap,
                             std::size_t particle_cap) {
  if (!(x >= 0.0)) throw ConfigError("x must be >= 0");
  LeftmostTrace trace;
  const auto outcome = grow(x, rng, n_cap, particle_cap, [&](const ParticleGeneration& g) {
    trace.minima.push_back(
        g.positions.empty() ? std::numeric_limits<double>::infinity()
                            : *std::min_element(g.positions.begin(), g.positions.end()));
  });
  trace.truncated = outcome.status == HeightStatus::Truncated;
  return trace;
}

double EmpiricalCdf::p_hat(int n) const {
  if (n < 0) return 0.0;
  if (n > n_cap()) throw ConfigError("n beyond n_cap of the empirical CDF");
  return static_cast<double>(counts[static_cast<std::size_t>(n)]) /
         static_cast<double>(trials);
}

double EmpiricalCdf::standard_error(int n) const {
  const double p = p_hat(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

EmpiricalCdf empirical_cdf(const SimConfig& config) {
  config.validate();
  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<HeightSample> samples(trials);
  parallel_for(trials, config.threads, [&](std::size_t i) {
    Rng rng = substream(config.seed, i);
    samples[i] = sample_height(config.x, rng, config.n_cap, config.particle_cap);
  });

  EmpiricalCdf cdf;
  cdf.x = config.x;
  cdf.trials = config.trials;
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(config.n_cap) + 1, 0);
  for (const auto& s : samples) {
    switch (s.status) {
      case HeightStatus::Resolved:
        ++histogram[static_cast<std::size_t>(s.height)];
        break;
      case HeightStatus::BeyondCap:
        ++cdf.beyond_cap;
        break;
      case HeightStatus::Truncated:
        ++cdf.truncated;
        break;
    }
  }
  cdf.counts.resize(histogram.size());
  std::int64_t running = 0;
  for (std::size_t n = 0; n < histogram.size(); ++n) {
    running += histogram[n];
    cdf.counts[n] = running;
  }
  return cdf;
}

void write_empirical_cdf_csv(const std::string& path, const EmpiricalCdf& cdf) {
  csv::Writer out(path);
  out.header({"n", "count", "p_hat", "stderr"});
  for (int n = 0; n <= cdf.n_cap(); ++n)
    out.row({csv::format_int(n), csv::format_int(cdf.counts[static_cast<std::size_t>(n)]),
             csv::format_double(cdf.p_hat(n)), csv::format_double(cdf.standard_error(n))});
  out.close();
}

CascadeGraph sample_cascade_edges(int n_vertices, double c, Rng& rng) {
  if (n_vertices < 1) throw ConfigError("cascade graph needs >= 1 vertex");
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("edge probability must lie in [0, 1]");
  CascadeGraph g;
  g.n_vertices = n_vertices;
  g.out.resize(static_cast<std::size_t>(n_vertices));
  std::bernoulli_distribution edge(c);
  for (int i = 0; i < n_vertices; ++i)
    for (int j = i + 1; j < n_vertices; ++j)
      if (edge(rng)) g.out[static_cast<std::size_t>(i)].push_back(j);
  return g;
}

int longest_path_from_first(const CascadeGraph& graph) {
  // Vertex ids are a topological order, so one forward sweep suffices.
  std::vector<int> dist(static_cast<std::size_t>(graph.n_vertices), -1);
  dist[0] = 0;
  int best = 0;
  for (int i = 0; i < graph.n_vertices; ++i) {
    const int d = dist[static_cast<std::size_t>(i)];
    if (d < 0) continue;
    best = std::max(best, d);
    for (int j : graph.out[static_cast<std::size_t>(i)])
      dist[static_cast<std::size_t>(j)] = std::max(dist[static_cast<std::size_t>(j)], d + 1);
  }
  return best;
}

CascadeGraphSample sample_cascade_graph(int n_vertices, double c, Rng& rng) {
  if (n_vertices < 1) throw ConfigError("cascade graph needs >= 1 vertex");
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("edge probability must lie in [0, 1]");
  CascadeGraphSample sample{n_vertices, c, 0};
  if (c == 0.0 || n_vertices == 1) return sample;

  std::vector<int> dist(static_cast<std::size_t>(n_vertices), -1);
  dist[0] = 0;
  std::geometric_distribution<long long> gap(c < 1.0 ? c : 0.5);
  for (int i = 0; i < n_vertices; ++i) {
    const int d = dist[static_cast<std::size_t>(i)];
    if (d < 0) continue;
    sample.longest_path_from_1 = std::max(sample.longest_path_from_1, d);
    long long j = i;
    while (true) {
      j += 1 + (c < 1.0 ? gap(rng) : 0);
      if (j >= n_vertices) break;
      auto& dj = dist[static_cast<std::size_t>(j)];
      dj = std::max(dj, d + 1);
    }
  }
  return sample;
}

double ks_two_sample(std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) throw ConfigError("KS statistic needs two non-empty samples");
  std::vector<int> sa(a.begin(), a.end());
  std::vector<int> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  // Evaluate both CDFs just after each distinct value.
  while (ia < sa.size() || ib < sb.size()) {
    int v;
    if (ib == sb.size() || (ia < sa.size() && sa[ia] <= sb[ib]))
      v = sa[ia];
    else
      v = sb[ib];
    while (ia < sa.size() && sa[ia] == v) ++ia;
    while (ib < sb.size() && sb[ib] == v) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (n == 0 || m == 0) throw ConfigError("sample sizes must be positive");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

namespace {

std::vector<double> integer_cdf(std::span<const int> sample, int k_max) {
  std::vector<double> cdf(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int v : sample)
    if (v <= k_max) cdf[static_cast<std::size_t>(v)] += 1.0;
  double running = 0.0;
  for (auto& c : cdf) {
    running += c;
    c = running / static_cast<double>(sample.size());
  }
  return cdf;
}

}  // namespace

DiscreteContinuumReport compare_discrete_continuum(int n_vertices, double x,
                                                   int trials, std::uint64_t seed,
                                                   unsigned threads,
                                                   std::size_t particle_cap) {
  if (n_vertices < 1) throw ConfigError("n_vertices must be >= 1");
  if (!(x >= 0.0) || x > n_vertices)
    throw ConfigError("need 0 <= x <= n_vertices so that c = x / n_vertices <= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");

  DiscreteContinuumReport report;
  report.n_vertices = n_vertices;
  report.x = x;
  report.c = x / n_vertices;
  report.trials = trials;

  // Far beyond any height reachable within the particle cap.
  constexpr int kHeightCap = 100000;
  const auto count = static_cast<std::size_t>(trials);
  std::vector<int> discrete(count);
  std::vector<int> continuum(count);
  std::vector<char> truncated(count, 0);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng graph_rng = substream(seed, 2 * i);
    discrete[i] = sample_cascade_graph(n_vertices, report.c, graph_rng).longest_path_from_1;
    Rng tree_rng = substream(seed, 2 * i + 1);
    const auto h = sample_height(x, tree_rng, kHeightCap, particle_cap);
    continuum[i] = h.height;
    truncated[i] = h.status != HeightStatus::Resolved;
  });
  report.truncated_continuum = std::count(truncated.begin(), truncated.end(), 1);

  const int k_max = std::max(*std::max_element(discrete.begin(), discrete.end()),
                             *std::max_element(continuum.begin(), continuum.end()));
  report.p_discrete = integer_cdf(discrete, k_max);
  report.p_continuum = integer_cdf(continuum, k_max);
  report.ks_statistic = ks_two_sample(discrete, continuum);
  report.ks_critical_1pct = ks_critical_value(0.01, count, count);
  return report;
}

void write_comparison_csv(const std::string& path,
                          const DiscreteContinuumReport& report) {
  csv::Writer out(path);
  out.header({"n", "p_discrete", "p_continuum"});
  for (std::size_t k = 0; k < report.p_discrete.size(); ++k)
    out.row({csv::format_int(static_cast<std::int64_t>(k)),
             csv::format_double(report.p_discrete[k]),
             csv::format_double(report.p_continuum[k])});
  out.row({"ks", csv::format_double(report.ks_statistic),
           csv::format_double(report.ks_critical_1pct)});
  out.close();
}

void write_integer_cdf_csv(const std::string& path, std::span<const int> sample) {
  if (sample.empty()) throw ConfigError("empty sample");
  const int k_max = *std::max_element(sample.begin(), sample.end());
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(k_max) + 1, 0);
  for (int v : sample) ++histogram[static_cast<std::size_t>(v)];
  const double total = static_cast<double>(sample.size());
  csv::Writer out(path);
  out.header({"n", "count", "p_hat", "stderr"});
  std::int64_t running = 0;
  for (int k = 0; k <= k_max; ++k) {
    running += histogram[static_cast<std::size_t>(k)];
    const double p = static_cast<double>(running) / total;
    out.row({csv::format_int(k), csv::format_int(running), csv::format_double(p),
             csv::format_double(std::sqrt(p * (1.0 - p) / total))});
  }
  out.close();
}

}  // namespace cascade
