#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cascade::cli {

enum class Command { Recurse, Front, Simulate, Graph, Brw, Compare, AlphaScan };

std::string_view to_string(Command c);
/// ConfigError for an unknown name.
Command parse_command(std::string_view name);
const std::vector<Command>& all_commands();

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Accepted parameters of a command with their defaults.
const std::vector<ParamSpec>& schema(Command c);

struct RunManifest {
  Command command = Command::Recurse;
  std::map<std::string, std::string> parameters;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 1;
};

/// Typed access to a command's parameters with defaults filled in from the
/// schema. Unknown keys and malformed values raise ConfigError.
class Params {
 public:
  Params(Command command, const std::map<std::string, std::string>& given);

  const std::map<std::string, std::string>& resolved() const { return values_; }

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  unsigned threads() const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Flat `key = value` lines; blank lines and lines starting with '#' are
/// skipped. The keys `seed` and `out` are read by the caller.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ArtifactEntry {
  std::string file;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Writes manifest.txt: command, seed, every resolved parameter and one line
/// per artifact with its checksum and size. Contains no timestamps.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest,
                    const std::map<std::string, std::string>& resolved,
                    const std::vector<ArtifactEntry>& artifacts);

/// Exit status: 0 success, 2 configuration error, 3 numeric, fit or domain
/// error, 4 I/O error. Diagnostics go to `err`, progress to `log`.
int run(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Parses command-line arguments and calls run().
int main_entry(int argc, char** argv);

}  // namespace cascade::cli
