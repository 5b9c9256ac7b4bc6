#ifndef SATORIS_CSV_IO_HPP
#define SATORIS_CSV_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "satoris/matrix_core.hpp"

namespace satoris {

/// Significant digits emitted by every CSV writer in the project.
inline constexpr int kCsvDigits = 12;

/// Locale-independent shortest-general formatting at kCsvDigits digits.
inline std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, kCsvDigits);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view field, std::string_view context) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError(std::string(context) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

/// Parses a header-less comma-separated matrix. Rows must have equal length
/// and every value must be finite.
inline Matrix parse_csv_matrix(std::istream& in, std::string_view context = "csv") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    const std::string where = std::string(context) + ":" + std::to_string(line_no);
    for (auto field : split_fields(line)) row.push_back(parse_number(field, where));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(where + ": expected " + std::to_string(rows.front().size()) +
                      " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(std::string(context) + ": no data");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  require_finite(m, context);
  return m;
}

inline Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv_matrix(in, path.string());
}

inline void write_csv_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

inline void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv_matrix(out, m);
}

}  // namespace satoris

#endif  // SATORIS_CSV_IO_HPP
