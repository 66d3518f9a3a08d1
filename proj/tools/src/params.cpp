#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "cascade/cli.hpp"
#include "cascade/error.hpp"

namespace cascade::cli {

namespace {

constexpr std::pair<Command, std::string_view> kNames[] = {
    {Command::Recurse, "recurse"}, {Command::Front, "front"},
    {Command::Simulate, "simulate"}, {Command::Graph, "graph"},
    {Command::Brw, "brw"}, {Command::Compare, "compare"},
    {Command::AlphaScan, "alpha-scan"},
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("parameter '" + key + "': cannot parse '" + text + "'");
  return value;
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kNames)
    if (cmd == c) return name;
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kNames)
    if (n == name) return cmd;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = [] {
    std::vector<Command> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return commands;
}

const std::vector<ParamSpec>& schema(Command c) {
  static const std::vector<ParamSpec> recurse{
      {"delta", "0.01", "grid spacing"},
      {"xmax", "50", "grid length"},
      {"nmax", "100", "last generation"},
      {"snapshots", "", "generations to write (default: nmax)"},
      {"quadrature", "trapezoid", "trapezoid or riemann"},
  };
  static const std::vector<ParamSpec> front{
      {"delta", "0.01", "grid spacing"},
      {"xmax", "0", "grid length (0: smallest admissible)"},
      {"nmax", "400", "last generation"},
      {"level", "0.5", "front level"},
      {"quadrature", "trapezoid", "trapezoid or riemann"},
      {"fit-lo", "0", "first generation of the fit window (0: nmax/4)"},
      {"fit-hi", "0", "last generation of the fit window (0: nmax)"},
      {"velocity", "richardson", "richardson, joint or a fixed number"},
  };
  static const std::vector<ParamSpec> simulate{
      {"x", "1", "interval length"},
      {"trials", "10000", "number of trees"},
      {"ncap", "50", "largest height resolved"},
      {"particle-cap", "1000000", "live particle limit per tree"},
      {"threads", "0", "worker threads (0: all cores)"},
  };
  static const std::vector<ParamSpec> graph{
      {"vertices", "100", "number of vertices"},
      {"c", "", "edge probability (default: x / vertices)"},
      {"x", "2", "used when c is not given"},
      {"trials", "10000", "number of graphs"},
      {"threads", "0", "worker threads (0: all cores)"},
  };
  static const std::vector<ParamSpec> brw{
      {"generations", "40", "last generation"},
      {"trials", "1000", "number of walks"},
      {"vmax", "20", "displacement cutoff"},
      {"freeze-level", "8", "position above which particles stop branching"},
      {"particle-cap", "1000000", "live particle limit per walk"},
      {"threads", "0", "worker threads (0: all cores)"},
      {"probe", "false", "also tabulate the limit-law probe"},
      {"probe-delta", "0.001", "grid spacing for the probe recursion"},
      {"probe-ns", "100,150,200", "generations for the probe"},
      {"probe-z", "-4,-2,-1,0,1,2,4", "offsets for the probe"},
  };
  static const std::vector<ParamSpec> compare{
      {"vertices", "2000", "number of vertices"},
      {"x", "2", "interval length; c = x / vertices"},
      {"trials", "20000", "samples per side"},
      {"particle-cap", "1000000", "live particle limit per tree"},
      {"threads", "0", "worker threads (0: all cores)"},
  };
  static const std::vector<ParamSpec> alpha_scan{
      {"deltas", "0.02,0.01,0.005,0.001", "grid spacings"},
      {"nmax", "100", "last generation"},
      {"alpha-lo", "0.95", "lower end of the search bracket"},
      {"alpha-hi", "1.01", "upper end of the search bracket"},
      {"quadrature", "riemann", "trapezoid or riemann"},
  };
  switch (c) {
    case Command::Recurse: return recurse;
    case Command::Front: return front;
    case Command::Simulate: return simulate;
    case Command::Graph: return graph;
    case Command::Brw: return brw;
    case Command::Compare: return compare;
    case Command::AlphaScan: return alpha_scan;
  }
  throw ConfigError("unknown command");
}

Params::Params(Command command, const std::map<std::string, std::string>& given) {
  const auto& spec = schema(command);
  for (const auto& p : spec) values_[p.key] = p.default_value;
  for (const auto& [key, value] : given) {
    const bool known = std::any_of(spec.begin(), spec.end(),
                                   [&](const ParamSpec& p) { return p.key == key; });
    if (!known)
      throw ConfigError("command '" + std::string(to_string(command)) +
                        "' has no parameter '" + key + "'");
    values_[key] = trim(value);
  }
}

std::string Params::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double Params::real(const std::string& key) const { return parse_number<double>(key, text(key)); }

int Params::integer(const std::string& key) const { return parse_number<int>(key, text(key)); }

std::size_t Params::count(const std::string& key) const {
  return parse_number<std::size_t>(key, text(key));
}

unsigned Params::threads() const { return parse_number<unsigned>("threads", text("threads")); }

bool Params::flag(const std::string& key) const {
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
  throw ConfigError("parameter '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> Params::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(text(key))) out.push_back(parse_number<double>(key, item));
  return out;
}

std::vector<int> Params::integers(const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split_list(text(key))) out.push_back(parse_number<int>(key, item));
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty())
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": empty key");
    out[key] = trim(std::string_view(content).substr(eq + 1));
  }
  return out;
}

}  // namespace cascade::cli
