#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <system_error>

#include "cascade/cli.hpp"
#include "cascade/error.hpp"
#include "cascade/front.hpp"
#include "cascade/martingale.hpp"
#include "cascade/parallel.hpp"
#include "cascade/recursion.hpp"
#include "cascade/simulation.hpp"

namespace cascade::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 1;

class ArtifactSink {
 public:
  ArtifactSink(std::filesystem::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {}

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void record(const std::string& name) {
    const auto p = dir_ / name;
    std::error_code ec;
    const auto size = std::filesystem::file_size(p, ec);
    if (ec) throw IoError("cannot stat " + p.string() + ": " + ec.message());
    entries_.push_back({name, sha256_file(p), size});
    log_ << "wrote " << p.string() << '\n';
  }

  const std::vector<ArtifactEntry>& entries() const { return entries_; }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
  std::vector<ArtifactEntry> entries_;
};

void run_recurse(const Params& p, ArtifactSink& sink) {
  RecursionConfig config;
  config.delta = p.real("delta");
  config.x_max = p.real("xmax");
  config.n_max = p.integer("nmax");
  config.quadrature = parse_quadrature(p.text("quadrature"));
  std::vector<int> snapshots = p.integers("snapshots");
  if (snapshots.empty()) snapshots.push_back(config.n_max);
  std::sort(snapshots.begin(), snapshots.end());
  snapshots.erase(std::unique(snapshots.begin(), snapshots.end()), snapshots.end());

  const auto result = run_recursion(config, snapshots);
  for (int n : snapshots) {
    const std::string name = "pn_" + std::to_string(n) + ".csv";
    write_snapshot_csv(sink.path(name), result.snapshot(n));
    sink.record(name);
  }
}

void run_front(const Params& p, ArtifactSink& sink) {
  RecursionConfig config;
  config.delta = p.real("delta");
  config.n_max = p.integer("nmax");
  config.x_max = p.real("xmax");
  if (config.x_max == 0.0) config.x_max = minimum_front_x_max(config.n_max);
  config.quadrature = parse_quadrature(p.text("quadrature"));

  const auto trace = trace_fronts(config, p.real("level"));
  write_front_trace_csv(sink.path("front_trace.csv"), trace);
  sink.record("front_trace.csv");

  FitWindow window{p.integer("fit-lo"), p.integer("fit-hi")};
  if (window.lo == 0) window.lo = std::max(1, config.n_max / 4);
  if (window.hi == 0) window.hi = config.n_max;

  const std::string mode = p.text("velocity");
  std::optional<double> v_fixed;
  if (mode == "richardson") {
    v_fixed = richardson_velocity(trace, window);
  } else if (mode != "joint") {
    v_fixed = p.real("velocity");
  }
  write_front_fit_csv(sink.path("front_fit.csv"), log_correction_fit(trace, window, v_fixed));
  sink.record("front_fit.csv");
}

void run_simulate(const Params& p, std::uint64_t seed, ArtifactSink& sink) {
  SimConfig config;
  config.x = p.real("x");
  config.trials = p.integer("trials");
  config.n_cap = p.integer("ncap");
  config.particle_cap = p.count("particle-cap");
  config.threads = p.threads();
  config.seed = seed;
  write_empirical_cdf_csv(sink.path("empirical_cdf.csv"), empirical_cdf(config));
  sink.record("empirical_cdf.csv");
}

void run_graph(const Params& p, std::uint64_t seed, ArtifactSink& sink) {
  const int vertices = p.integer("vertices");
  if (vertices < 1) throw ConfigError("vertices must be at least 1");
  const double c = p.text("c").empty() ? p.real("x") / vertices : p.real("c");
  const int trials = p.integer("trials");
  if (trials < 1) throw ConfigError("trials must be at least 1");

  std::vector<int> lengths(static_cast<std::size_t>(trials));
  parallel_for(lengths.size(), p.threads(), [&](std::size_t i) {
    Rng rng = substream(seed, i);
    lengths[i] = sample_cascade_graph(vertices, c, rng).longest_path_from_1;
  });
  write_integer_cdf_csv(sink.path("longest_path_cdf.csv"), lengths);
  sink.record("longest_path_cdf.csv");
}

void run_brw(const Params& p, std::uint64_t seed, ArtifactSink& sink) {
  write_moment_report_csv(sink.path("moments.csv"), verify_boundary_conditions());
  sink.record("moments.csv");

  BrwOptions options;
  options.v_max = p.real("vmax");
  options.freeze_level = p.real("freeze-level");
  options.particle_cap = p.count("particle-cap");
  const int trials = p.integer("trials");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  const auto trajectories = simulate_trajectories(p.integer("generations"), trials, seed,
                                                  options, p.threads());
  write_trajectories_csv(sink.path("trajectories.csv"), trajectories);
  sink.record("trajectories.csv");

  if (!p.flag("probe")) return;
  const std::vector<int> ns = p.integers("probe-ns");
  const std::vector<double> zs = p.reals("probe-z");
  if (ns.empty() || zs.empty()) throw ConfigError("probe-ns and probe-z must be non-empty");
  const int n_hi = *std::max_element(ns.begin(), ns.end());
  if (*std::min_element(ns.begin(), ns.end()) < 1) throw ConfigError("probe-ns must be positive");

  RecursionConfig config;
  config.delta = p.real("probe-delta");
  config.n_max = std::max(n_hi, 200);
  const double z_hi = *std::max_element(zs.begin(), zs.end());
  config.x_max = std::max(minimum_front_x_max(config.n_max), probe_abscissa(n_hi) + z_hi + 1.0);
  std::vector<int> keep;
  for (int n : ns) keep.push_back(n - 1);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  const auto recursion = run_recursion(config, keep);
  write_limit_probe_csv(sink.path("limit_probe.csv"), equivalence_check(recursion, zs, ns));
  sink.record("limit_probe.csv");
}

void run_compare(const Params& p, std::uint64_t seed, ArtifactSink& sink) {
  const auto report = compare_discrete_continuum(p.integer("vertices"), p.real("x"),
                                                 p.integer("trials"), seed, p.threads(),
                                                 p.count("particle-cap"));
  write_comparison_csv(sink.path("comparison.csv"), report);
  sink.record("comparison.csv");
}

void run_alpha_scan(const Params& p, ArtifactSink& sink) {
  AlphaScanOptions options;
  options.alpha_lo = p.real("alpha-lo");
  options.alpha_hi = p.real("alpha-hi");
  options.quadrature = parse_quadrature(p.text("quadrature"));
  const auto deltas = p.reals("deltas");
  if (deltas.empty()) throw ConfigError("deltas must be non-empty");
  write_alpha_scan_csv(sink.path("alpha_scan.csv"), alpha_scan(deltas, p.integer("nmax"), options));
  sink.record("alpha_scan.csv");
}

void dispatch(const RunManifest& manifest, const Params& params, ArtifactSink& sink) {
  switch (manifest.command) {
    case Command::Recurse: return run_recurse(params, sink);
    case Command::Front: return run_front(params, sink);
    case Command::Simulate: return run_simulate(params, manifest.seed, sink);
    case Command::Graph: return run_graph(params, manifest.seed, sink);
    case Command::Brw: return run_brw(params, manifest.seed, sink);
    case Command::Compare: return run_compare(params, manifest.seed, sink);
    case Command::AlphaScan: return run_alpha_scan(params, sink);
  }
  throw ConfigError("unknown command");
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("CASCADE_OUTPUT_DIR"); env != nullptr && *env != '\0')
    return env;
  return ".";
}

std::string describe(Command c) {
  switch (c) {
    case Command::Recurse: return "iterate the recursion and write P_n snapshots";
    case Command::Front: return "trace the front and fit its logarithmic correction";
    case Command::Simulate: return "Monte Carlo empirical CDF of the tree height H(x)";
    case Command::Graph: return "longest path from vertex 1 in random cascade graphs";
    case Command::Brw: return "boundary-case moments and derivative martingale paths";
    case Command::Compare: return "two-sample KS test of L_n against H(x)";
    case Command::AlphaScan: return "discretisation factor minimising probe drift";
  }
  return {};
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t seed = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, seed);
  if (ec != std::errc{} || ptr != end) throw ConfigError("seed: cannot parse '" + text + "'");
  return seed;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
  try {
    const Params params(manifest.command, manifest.parameters);

    std::error_code ec;
    std::filesystem::create_directories(manifest.output_dir, ec);
    if (ec || !std::filesystem::is_directory(manifest.output_dir))
      throw IoError("cannot create output directory " + manifest.output_dir.string() +
                    (ec ? ": " + ec.message() : std::string{}));

    ArtifactSink sink(manifest.output_dir, log);
    dispatch(manifest, params, sink);
    write_manifest(manifest.output_dir, manifest, params.resolved(), sink.entries());
    log << "wrote " << (manifest.output_dir / "manifest.txt").string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FrontNotFound& e) {
    err << "front error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Cascade model recursion, simulation and analysis"};
  app.require_subcommand(1);

  std::string seed_text;
  std::string out_dir;
  std::string config_file;
  app.add_option("--seed", seed_text, "random seed (default 1)");
  app.add_option("--out", out_dir, "output directory (default $CASCADE_OUTPUT_DIR or .)");
  app.add_option("--config", config_file, "key=value file; command-line flags take precedence");

  std::map<Command, std::map<std::string, std::string>> flag_values;
  std::map<Command, std::vector<std::pair<std::string, CLI::Option*>>> flag_options;
  std::map<Command, CLI::App*> subcommands;
  for (Command c : all_commands()) {
    auto* sub = app.add_subcommand(std::string(to_string(c)), describe(c));
    sub->fallthrough();
    subcommands[c] = sub;
    for (const auto& spec : schema(c)) {
      auto* opt = sub->add_option("--" + spec.key, flag_values[c][spec.key], spec.help);
      if (!spec.default_value.empty()) opt->default_str(spec.default_value);
      flag_options[c].emplace_back(spec.key, opt);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunManifest manifest;
    for (Command c : all_commands())
      if (subcommands[c]->parsed()) manifest.command = c;

    std::map<std::string, std::string> from_file;
    if (!config_file.empty()) from_file = read_config_file(config_file);

    if (auto it = from_file.find("seed"); it != from_file.end()) {
      manifest.seed = parse_seed(it->second);
      from_file.erase(it);
    }
    manifest.output_dir = default_output_dir();
    if (auto it = from_file.find("out"); it != from_file.end()) {
      manifest.output_dir = it->second;
      from_file.erase(it);
    }
    if (!seed_text.empty()) manifest.seed = parse_seed(seed_text);
    if (!out_dir.empty()) manifest.output_dir = out_dir;

    manifest.parameters = std::move(from_file);
    for (const auto& [key, opt] : flag_options[manifest.command])
      if (opt->count() > 0) manifest.parameters[key] = flag_values[manifest.command][key];

    return run(manifest, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace cascade::cli
