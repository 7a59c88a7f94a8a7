// SPDX-License-Identifier: Apache-2.0
#include "dsa/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dsa/errors.hpp"

namespace dsa {

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(precision) << v;
  return os.str();
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header.size()) {
    throw PreconditionError("table row width differs from header");
  }
  rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Table::Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << csv_escape(header[i]);
  }
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << (i ? "," : "") << csv_escape(cell_text(r[i]));
    }
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::visit([&](const auto& v) { o[header[i]] = v; }, r[i]);
    }
    arr.push_back(std::move(o));
  }
  os << arr.dump(2) << '\n';
}

std::string write_table(const Table& t, const std::string& path_stem,
                        TableFormat fmt) {
  const std::string path =
      path_stem + (fmt == TableFormat::Csv ? ".csv" : ".json");
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.imbue(std::locale::classic());
  if (fmt == TableFormat::Csv) {
    t.write_csv(f);
  } else {
    t.write_json(f);
  }
  return path;
}

void write_complex_matrix(std::ostream& os, const CMatrix& m) {
  os << "# " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      os << (j ? "," : "") << format_number(m(i, j).real(), 17) << ','
         << format_number(m(i, j).imag(), 17);
    }
    os << '\n';
  }
}

CMatrix read_complex_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw ConfigError("complex matrix: missing '# rows cols' header");
  }
  std::istringstream hs(line.substr(2));
  hs.imbue(std::locale::classic());
  Eigen::Index rows = 0, cols = 0;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0) {
    throw ConfigError("complex matrix: bad header");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw ConfigError("complex matrix: short");
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      char c1 = ',', c2 = ',';
      if (j > 0) ls >> c1;
      if (!(ls >> re >> c2 >> im) || c1 != ',' || c2 != ',') {
        throw ConfigError("complex matrix: bad entry in row " +
                          std::to_string(i));
      }
      m(i, j) = {re, im};
    }
  }
  return m;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace dsa
