#pragma once

#include "bfspec/empirical/sieve.hpp"
#include "bfspec/errors.hpp"

#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bfspec::io {

/// Header line for text outputs: "# key=value key=value ...".
inline std::string provenance_line(const std::string& config_hash, std::uint64_t seed, const std::string& extra = "") {
  std::string s = "# config_hash=" + config_hash + " seed=" + std::to_string(seed);
  if (!extra.empty()) s += " " + extra;
  return s;
}

/// CSV: lattice coordinates x0..x{d-1}, then the embedded position y0..y{d-1}
/// when it differs from the coordinates (quadratic fields, shifted sieves).
inline void write_points_csv(std::ostream& os, const empirical::SievedSet& s, const std::string& provenance) {
  if (!provenance.empty()) os << provenance << '\n';
  bool same = true;
  for (std::size_t i = 0; same && i < s.coords.size(); ++i) same = static_cast<double>(s.coords[i]) == s.points[i];
  for (std::size_t j = 0; j < s.dim; ++j) os << (j ? "," : "") << 'x' << j;
  if (!same)
    for (std::size_t j = 0; j < s.dim; ++j) os << ",y" << j;
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.dim; ++j) os << (j ? "," : "") << s.coord(i)[j];
    if (!same)
      for (std::size_t j = 0; j < s.dim; ++j) os << ',' << s.point(i)[j];
    os << '\n';
  }
}

/// Integer coordinates from a CSV written by write_points_csv (comment lines skipped).
inline std::vector<std::vector<std::int64_t>> read_points_csv(std::istream& is, std::size_t& dim) {
  std::vector<std::vector<std::int64_t>> rows;
  std::string line;
  bool header = false;
  dim = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      header = true;
      for (const auto& c : cells) dim += !c.empty() && c[0] == 'x';
      continue;
    }
    if (cells.size() < dim) throw ConfigError("short CSV row: '" + line + "'");
    std::vector<std::int64_t> row;
    for (std::size_t j = 0; j < dim; ++j) row.push_back(std::stoll(cells[j]));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline void put_le64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_le64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("truncated binary point file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

/// Binary: dimension (u64), count (u64), then count*dim signed 64-bit
/// coordinates, all little-endian.
inline void write_points_binary(std::ostream& os, const empirical::SievedSet& s) {
  detail::put_le64(os, s.dim);
  detail::put_le64(os, s.size());
  for (auto c : s.coords) detail::put_le64(os, static_cast<std::uint64_t>(c));
}

struct BinaryPoints {
  std::size_t dim = 0;
  std::vector<std::int64_t> coords;
  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
};

inline BinaryPoints read_points_binary(std::istream& is) {
  BinaryPoints out;
  out.dim = static_cast<std::size_t>(detail::get_le64(is));
  const std::uint64_t n = detail::get_le64(is);
  if (out.dim == 0 || out.dim > 64) throw ConfigError("binary point file: bad dimension");
  if (n > (1ULL << 40) / out.dim) throw ConfigError("binary point file: implausible count");
  out.coords.reserve(static_cast<std::size_t>(n * out.dim));
  for (std::uint64_t i = 0; i < n * out.dim; ++i) out.coords.push_back(static_cast<std::int64_t>(detail::get_le64(is)));
  return out;
}

}  // namespace bfspec::io
