#pragma once

#include <string>
#include <vector>

#include "srecop/types.hpp"

namespace srecop {

struct EmpiricalVariogram {
  std::vector<double> h;       // bin centers
  std::vector<double> gamma;   // semivariance estimates
  std::vector<long> count;     // pairs per bin
};

/// Robust Cressie-Hawkins estimator on all point pairs within the cutoff.
EmpiricalVariogram cressie_hawkins_variogram(const std::vector<Point>& coords,
                                             const Vector& values, Metric metric,
                                             double dist_scale, int bins, double cutoff);

struct VariogramFit {
  bool ok = false;
  std::string model;
  double nugget = 0.0;
  double partial_sill = 0.0;
  double range = 0.0;
  double sse = 0.0;
};

/// Weighted least-squares fit of a named semivariogram model
/// (spherical | exponential | wave) by profiling the range over a log grid;
/// nugget and partial sill solve linearly at each candidate range.
VariogramFit fit_variogram(const EmpiricalVariogram& emp, const std::string& model);

/// OLS residuals of values on (1, x, y).
Vector detrend_linear(const std::vector<Point>& coords, const Vector& values);

}  // namespace srecop
