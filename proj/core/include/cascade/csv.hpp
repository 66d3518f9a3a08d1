#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace cascade::csv {

/// 17 significant digits, locale-independent.
std::string format_double(double value);

std::string format_int(std::int64_t value);

/// Minimal CSV writer. Opens on construction, throws IoError on failure.
class Writer {
 public:
  explicit Writer(const std::string& path);

  void header(std::initializer_list<std::string_view> columns);
  void row(std::initializer_list<std::string> cells);
  void row(const std::vector<std::string>& cells);

  /// Flushes and closes; throws IoError if the stream went bad.
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

/// Parsed CSV: header plus string cells. Throws IoError when unreadable.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read(const std::string& path);

}  // namespace cascade::csv
