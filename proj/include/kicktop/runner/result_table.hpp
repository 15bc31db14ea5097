#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kicktop {

inline constexpr std::string_view kVersion = "kicktop 0.1.0";

// Tabular experiment output: '#'-prefixed metadata lines (full config echo,
// seed, version, wall time), one header row of column names with units, then
// rows of reals printed with 12 significant digits. Every file carries
// enough metadata to be regenerated.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("ResultTable: row width does not match columns");
    rows.push_back(std::move(row));
  }

  void write(std::ostream& os) const {
    os << "# " << kVersion << "\n";
    for (const auto& [k, v] : metadata) os << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << columns[c] << (c + 1 < columns.size() ? "\t" : "\n");
    char buf[32];
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.12g", row[c]);
        os << buf << (c + 1 < row.size() ? "\t" : "\n");
      }
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ResultTable: cannot open " + path + " for writing");
    write(out);
  }
};

} // namespace kicktop
