#include "avpvar/data.hpp"

#include <cctype>
#include <cmath>

namespace avpvar {

Tcode tcode_from_int(int code) {
  switch (code) {
    case 1: return Tcode::Level;
    case 2: return Tcode::Difference;
    case 5: return Tcode::LogDifference;
    case 6: return Tcode::SecondLogDifference;
    default: throw DataError("unsupported tcode " + std::to_string(code) + " (valid: 1, 2, 5, 6)");
  }
}

int tcode_length_loss(Tcode code) {
  switch (code) {
    case Tcode::Level: return 0;
    case Tcode::Difference:
    case Tcode::LogDifference: return 1;
    case Tcode::SecondLogDifference: return 2;
  }
  return 0;
}

bool date_label_less(const std::string& a, const std::string& b) {
  // Digit runs compare as numbers so 1985M2 < 1985M10.
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      const std::string da = a.substr(i, ie - i), db = b.substr(j, je - j);
      const std::size_t za = da.find_first_not_of('0'), zb = db.find_first_not_of('0');
      const std::string na = za == std::string::npos ? "0" : da.substr(za);
      const std::string nb = zb == std::string::npos ? "0" : db.substr(zb);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

void TimeSeriesPanel::validate() const {
  if (values.rows() < 1) throw DataError("panel has no observations");
  if (static_cast<Eigen::Index>(names.size()) != values.cols())
    throw DataError("panel column count does not match names");
  if (!tcodes.empty() && static_cast<Eigen::Index>(tcodes.size()) != values.cols())
    throw DataError("panel column count does not match tcodes");
  if (!dates.empty()) {
    if (static_cast<Eigen::Index>(dates.size()) != values.rows())
      throw DataError("panel date index length does not match rows");
    for (std::size_t i = 1; i < dates.size(); ++i)
      if (!date_label_less(dates[i - 1], dates[i])) throw DataError("dates not strictly increasing at " + dates[i]);
  }
  if (!values.allFinite()) throw DataError("panel contains missing or non-finite values");
}

VectorXd apply_tcode(const VectorXd& series, Tcode code, const std::string& name) {
  const Eigen::Index t = series.size();
  const int loss = tcode_length_loss(code);
  if (t <= loss) throw DataError("series " + name + " too short for its tcode");
  if (code == Tcode::Level) return series;
  if (code == Tcode::Difference) return series.tail(t - 1) - series.head(t - 1);
  if ((series.array() <= 0.0).any())
    throw DataError("series " + name + " has non-positive values under a log transform");
  const VectorXd logs = series.array().log();
  const VectorXd d = logs.tail(t - 1) - logs.head(t - 1);
  if (code == Tcode::LogDifference) return d;
  return d.tail(t - 2) - d.head(t - 2);
}

TimeSeriesPanel transform_panel(const TimeSeriesPanel& raw) {
  raw.validate();
  int loss = 0;
  for (Tcode c : raw.tcodes) loss = std::max(loss, tcode_length_loss(c));
  const Eigen::Index t = raw.periods() - loss;
  if (t < 1) throw DataError("panel too short after transformation");
  TimeSeriesPanel out;
  out.names = raw.names;
  out.tcodes = raw.tcodes;
  out.values.resize(t, raw.series());
  for (Eigen::Index j = 0; j < raw.series(); ++j) {
    const Tcode c = raw.tcodes.empty() ? Tcode::Level : raw.tcodes[j];
    const VectorXd v = apply_tcode(raw.values.col(j), c, raw.names[j]);
    out.values.col(j) = v.tail(t);
  }
  if (!raw.dates.empty()) out.dates.assign(raw.dates.end() - t, raw.dates.end());
  return out;
}

MatrixXd standardize_columns(const MatrixXd& values, const std::vector<std::string>& names,
                             StandardizationState& state) {
  const Eigen::Index n = values.cols();
  state.means.resize(n);
  state.scales.resize(n);
  MatrixXd out(values.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const VectorXd col = values.col(j);
    const double sd = sample_sd(col);
    const std::string label = j < static_cast<Eigen::Index>(names.size()) ? names[j]
                                                                          : "column " + std::to_string(j);
    if (!(sd > 0.0) || !std::isfinite(sd)) throw DataError("series " + label + " has zero variance");
    state.means(j) = col.mean();
    state.scales(j) = sd;
    out.col(j) = (col.array() - state.means(j)) / sd;
  }
  return out;
}

MatrixXd destandardize_columns(const MatrixXd& values, const StandardizationState& state) {
  MatrixXd out = values;
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    out.col(j) = values.col(j).array() * state.scales(j) + state.means(j);
  return out;
}

StandardizedData standardize(const TimeSeriesPanel& panel, const DriverSet& drivers) {
  StandardizedData out;
  out.panel = panel;
  out.panel.values = standardize_columns(panel.values, panel.names, out.panel_state);
  out.drivers = drivers;
  if (drivers.count() > 0)
    out.drivers.values = standardize_columns(drivers.values, drivers.names, out.driver_state);
  return out;
}

CumulativeDrivers cumulative_drivers(const MatrixXd& z) {
  CumulativeDrivers c;
  c.values = MatrixXd::Zero(z.rows(), z.cols());
  for (Eigen::Index t = 1; t < z.rows(); ++t) c.values.row(t) = c.values.row(t - 1) + z.row(t - 1);
  return c;
}

CumulativeDrivers cumulative_drivers(const DriverSet& drivers) {
  return cumulative_drivers(drivers.values);
}

VarDesign build_design(const MatrixXd& values, int p) {
  if (p < 1) throw DataError("lag order must be at least 1");
  const Eigen::Index t = values.rows();
  const Eigen::Index n = values.cols();
  if (t <= p) throw DataError("insufficient data: T = " + std::to_string(t) + " with p = " +
                              std::to_string(p));
  VarDesign d;
  d.p = p;
  const Eigen::Index rows = t - p;
  d.x.resize(rows, n * p + 1);
  d.x.col(0).setOnes();
  for (int l = 1; l <= p; ++l) d.x.block(0, 1 + (l - 1) * n, rows, n) = values.block(p - l, 0, rows, n);
  d.y = values.bottomRows(rows);
  return d;
}

VectorXd lag_row(const MatrixXd& history, int p) {
  const Eigen::Index n = history.cols();
  const Eigen::Index t = history.rows();
  if (t < p) throw DataError("history shorter than lag order");
  VectorXd x(n * p + 1);
  x(0) = 1.0;
  for (int l = 1; l <= p; ++l) x.segment(1 + (l - 1) * n, n) = history.row(t - l).transpose();
  return x;
}

}  // namespace avpvar
