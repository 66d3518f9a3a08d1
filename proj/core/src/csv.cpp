#include "cascade/csv.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "cascade/error.hpp"

namespace cascade::csv {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw IoError("cannot format floating-point value");
  return std::string(buf.data(), end);
}

std::string format_int(std::int64_t value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw IoError("cannot format integer value");
  return std::string(buf.data(), end);
}

Writer::Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
}

void Writer::header(std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto c : columns) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

void Writer::row(std::initializer_list<std::string> cells) {
  row(std::vector<std::string>(cells));
}

void Writer::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void Writer::close() {
  out_.flush();
  if (!out_) throw IoError("write to '" + path_ + "' failed");
  out_.close();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Table table;
  std::string line;
  if (std::getline(in, line)) table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_line(line));
  }
  return table;
}

}  // namespace cascade::csv
