#pragma once

#include "avpvar/linalg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace avpvar {

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

enum class Tcode { Level = 1, Difference = 2, LogDifference = 5, SecondLogDifference = 6 };

Tcode tcode_from_int(int code);

// Ordering of opaque date labels with digit runs compared numerically.
bool date_label_less(const std::string& a, const std::string& b);
int tcode_length_loss(Tcode code);

//' Endogenous variables: T x n values with dates, names and transformation codes.
struct TimeSeriesPanel {
  MatrixXd values;
  std::vector<std::string> dates;
  std::vector<std::string> names;
  std::vector<Tcode> tcodes;

  Eigen::Index periods() const { return values.rows(); }
  Eigen::Index series() const { return values.cols(); }
  void validate() const;
};

// Exogenous drivers Z_t (T x m); m may be 0.
struct DriverSet {
  MatrixXd values;
  std::vector<std::string> names;

  Eigen::Index periods() const { return values.rows(); }
  Eigen::Index count() const { return values.cols(); }
};

// C_t = sum_{s<t} Z_s; row 0 is zero.
struct CumulativeDrivers {
  MatrixXd values;
};

struct VarDesign {
  MatrixXd x;  // (T - p) x (n p + 1): [1, y_{t-1}', ..., y_{t-p}']
  MatrixXd y;  // (T - p) x n
  int p = 0;
};

struct StandardizationState {
  VectorXd means;
  VectorXd scales;
};

VectorXd apply_tcode(const VectorXd& series, Tcode code, const std::string& name = "series");

// Applies per-series tcodes and trims every series to the common length.
TimeSeriesPanel transform_panel(const TimeSeriesPanel& raw);

// Mean 0 / sample sd 1 per column. Throws DataError naming a zero-variance column.
MatrixXd standardize_columns(const MatrixXd& values, const std::vector<std::string>& names,
                             StandardizationState& state);
MatrixXd destandardize_columns(const MatrixXd& values, const StandardizationState& state);

struct StandardizedData {
  TimeSeriesPanel panel;
  DriverSet drivers;
  StandardizationState panel_state;
  StandardizationState driver_state;
};

StandardizedData standardize(const TimeSeriesPanel& panel, const DriverSet& drivers);

CumulativeDrivers cumulative_drivers(const DriverSet& drivers);
CumulativeDrivers cumulative_drivers(const MatrixXd& drivers);

VarDesign build_design(const MatrixXd& values, int p);
inline VarDesign build_design(const TimeSeriesPanel& panel, int p) {
  return build_design(panel.values, p);
}

// Regressor row [1, y_t', ..., y_{t-p+1}'] for a forecast from the last p rows of `history`.
VectorXd lag_row(const MatrixXd& history, int p);

}  // namespace avpvar
