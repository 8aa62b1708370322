#pragma once

#include <memory>
#include <string>
#include <vector>

#include "srecop/types.hpp"

namespace srecop {

enum class MarginalFamily { LogGaussian, SkewGaussian };

MarginalFamily marginal_family_from_string(const std::string& name);

/// Skew-Gaussian (location psi, scale omega, shape lambda) parameters that
/// reproduce the requested mean and variance. zeta = lambda / sqrt(1 +
/// lambda^2).
struct SkewGaussianParams {
  double psi = 0.0;
  double omega = 1.0;
  double lambda = 0.0;
};

SkewGaussianParams sg_params_from_moments(double mean, double var, double lambda);

/// Monotone shape-preserving cubic interpolant (Fritsch-Carlson) over
/// strictly increasing knots.
class MonotoneSpline {
 public:
  MonotoneSpline() = default;
  MonotoneSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, slope_;
};

/// Marginal law of the latent process at one BAU. Both families are
/// parameterized by (beta0, sigma_p): the mean is exp(beta0) in both, but
/// sigma_p is the log-scale sd for the log-Gaussian family and the
/// natural-scale sd for the skew-Gaussian family. The two conventions must
/// never be mixed; family-specific accessors keep them apart.
class Marginal {
 public:
  static Marginal log_gaussian(double beta0, double sigma_p);
  /// tabulate selects the 101-knot spline CDF/quantile over the
  /// [1e-6, 1 - 1e-6] quantile range; the pdf is always exact.
  static Marginal skew_gaussian(double beta0, double sigma_p, double lambda,
                                bool tabulate = false);

  MarginalFamily family() const { return family_; }
  double beta0() const { return beta0_; }
  double sigma_p() const { return sigma_p_; }
  double lambda() const { return lambda_; }
  double mean() const;
  double variance() const;
  const SkewGaussianParams& sg() const { return sg_; }

  double pdf(double y) const;
  double log_pdf(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;

  /// Exact (non-tabulated) evaluations, regardless of construction mode.
  double cdf_exact(double y) const;
  double quantile_exact(double u) const;

  bool tabulated() const { return cdf_spline_ != nullptr; }

 private:
  Marginal() = default;
  void build_tables();

  MarginalFamily family_ = MarginalFamily::LogGaussian;
  double beta0_ = 0.0;
  double sigma_p_ = 1.0;
  double lambda_ = 0.0;
  double log_mu_ = 0.0;  // LG log-scale mean beta0 - sigma_p^2 / 2
  SkewGaussianParams sg_;
  std::shared_ptr<const MonotoneSpline> cdf_spline_;
  std::shared_ptr<const MonotoneSpline> quantile_spline_;
  double table_lo_ = 0.0, table_hi_ = 0.0;  // y range covered by the tables
};

enum class DataModelFamily { LogGaussianMultiplicative, GaussianAdditive };

/// Measurement-error model [Z | Y]; both parameterizations satisfy
/// E(Z | Y) = Y.
struct DataModel {
  DataModelFamily family = DataModelFamily::GaussianAdditive;
  Vector sigma_o;  // per observed BAU (size 1 broadcasts)

  double sigma(Index k) const { return sigma_o.size() == 1 ? sigma_o(0) : sigma_o(k); }
};

double data_log_lik(double z, double y, DataModelFamily family, double sigma_o);
double draw_datum(double y, DataModelFamily family, double sigma_o, class Rng& rng);

}  // namespace srecop
