#include "avpvar/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace avpvar {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open data file");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ":1: missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);  // UTF-8 BOM
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2) throw DataError(path + ":1: header needs a date column and at least one series");
  CsvSeries t;
  for (std::size_t j = 1; j < header.size(); ++j) {
    const std::string name = trim(header[j]);
    if (name.empty()) throw DataError(path + ":1: empty column name at position " + std::to_string(j + 1));
    t.names.push_back(name);
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    t.dates.push_back(trim(cells[0]));
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const std::string c = trim(cells[j]);
      if (c.empty() || c == "NA" || c == "NaN" || c == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric value '" + c + "' in column " +
                        t.names[j - 1]);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(i, j) = rows[i][j];
  for (std::size_t i = 1; i < t.dates.size(); ++i)
    if (!date_label_less(t.dates[i - 1], t.dates[i]))
      throw DataError(path + ":" + std::to_string(i + 2) + ": date " + t.dates[i] + " does not follow " +
                      t.dates[i - 1]);
  return t;
}

MatrixXd select_columns(const CsvSeries& table, const std::vector<std::string>& names, const std::string& path) {
  MatrixXd out(table.values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = std::find(table.names.begin(), table.names.end(), names[j]);
    if (it == table.names.end()) throw DataError(path + ": column " + names[j] + " not found");
    out.col(static_cast<Eigen::Index>(j)) = table.values.col(it - table.names.begin());
  }
  return out;
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header, const MatrixXd& values,
                      const std::vector<std::string>& row_labels, const std::string& label_header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(10);
  bool first = true;
  if (!row_labels.empty()) {
    out << label_header;
    first = false;
  }
  for (const std::string& h : header) {
    if (!first) out << ',';
    out << h;
    first = false;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    first = true;
    if (!row_labels.empty()) {
      out << row_labels[static_cast<std::size_t>(i)];
      first = false;
    }
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!first) out << ',';
      out << values(i, j);
      first = false;
    }
    out << '\n';
  }
}

}  // namespace avpvar
