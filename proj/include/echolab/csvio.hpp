#pragma once
// Minimal CSV I/O: UTF-8, header row, '.' decimal separator, 17 significant
// digits (shortest round-trip-safe double precision).

#include <charconv>
#include <fstream>
#include <sstream>

#include "echolab/common.hpp"

namespace echolab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // column-major

  std::size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }

  const std::vector<double>& col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return columns[i];
    throw std::invalid_argument("csv: no column named '" + name + "'");
  }

  bool has_col(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << format_double(table.columns[c][r]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed for '" + path + "'");
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  table.columns.resize(table.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= table.columns.size())
        throw std::runtime_error("csv: too many fields at row " + std::to_string(row));
      double v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error("csv: bad number '" + cell + "' at row " + std::to_string(row));
      table.columns[c].push_back(v);
      ++c;
    }
    if (c != table.columns.size())
      throw std::runtime_error("csv: too few fields at row " + std::to_string(row));
  }
  return table;
}

}  // namespace echolab
