#pragma once

#include "avpvar/data.hpp"

#include <string>
#include <vector>

namespace avpvar {

//' Date-first numeric table: header row with names, first column an opaque
//' date label, remaining columns numeric. Empty or "NA" cells are missing.
struct CsvSeries {
  std::vector<std::string> dates;
  std::vector<std::string> names;  // numeric columns only
  MatrixXd values;                 // NaN for missing cells
};

std::vector<std::string> split_csv_line(const std::string& line);

// Throws DataError with "path:line:" context.
CsvSeries read_series_csv(const std::string& path);

// Columns selected by name, in the given order.
MatrixXd select_columns(const CsvSeries& table, const std::vector<std::string>& names, const std::string& path);

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header, const MatrixXd& values,
                      const std::vector<std::string>& row_labels = {}, const std::string& label_header = "");

}  // namespace avpvar
