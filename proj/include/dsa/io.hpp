// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "dsa/types.hpp"

namespace dsa {

// Locale-independent number formatting (shortest round-trip is not needed;
// 12 significant digits).
std::string format_number(double v, int precision = 12);

/// Header-first table written as CSV or as a JSON array of objects.
struct Table {
  using Cell = std::variant<double, long long, std::string>;

  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};

enum class TableFormat { Csv, Json };

// Writes `<path_stem>.csv` or `<path_stem>.json`; returns the file name.
std::string write_table(const Table& t, const std::string& path_stem,
                        TableFormat fmt);

// "# rows cols", then one line per row: re,im,re,im,...
void write_complex_matrix(std::ostream& os, const CMatrix& m);
CMatrix read_complex_matrix(std::istream& is);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace dsa
