#pragma once

#include <string>
#include <vector>

#include "srecop/types.hpp"

namespace srecop {

/// Per-BAU root-mean-squared prediction error across replicates: rows of
/// preds/truths are replicates, columns are BAUs.
Vector rmspe(const Matrix& preds, const Matrix& truths);

/// Per-BAU fraction of replicates whose interval [lo, hi] covers the truth.
Vector empirical_coverage(const Matrix& lo, const Matrix& hi, const Matrix& truths);

struct EssResult {
  double value = 0.0;  // clamped into [0, n]
  double raw = 0.0;    // unclamped estimate
  bool clamped = false;
  bool constant = false;
};

/// Effective sample size via the AR-spectral estimator (Yule-Walker with AIC
/// order selection, spectral density at frequency zero). Other conventions
/// can disagree by around ten percent.
EssResult ess(const Vector& draws);

/// Potential scale reduction factor sqrt(1 + B / (n W)) with B the
/// between-chain variance n * var(chain means) and W the mean within-chain
/// variance; duplicated chains give exactly 1. Rows of `chains` are chains.
struct GelmanRubinResult {
  double r_hat = 1.0;
  bool degenerate = false;  // zero within-chain variance
};
GelmanRubinResult gelman_rubin(const Matrix& chains);

/// Type-7 quantile (linear interpolation of order statistics).
double quantile(const Vector& draws, double p);

struct PosteriorSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;
};

PosteriorSummary summarize(const std::string& name, const Vector& draws);

}  // namespace srecop
