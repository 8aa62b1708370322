#include "srecop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srecop {

Vector rmspe(const Matrix& preds, const Matrix& truths) {
  if (preds.rows() == 0) throw std::invalid_argument("rmspe: no replicates");
  if (preds.rows() != truths.rows() || preds.cols() != truths.cols()) {
    throw std::invalid_argument("rmspe: shape mismatch");
  }
  const double r = static_cast<double>(preds.rows());
  return ((preds - truths).array().square().colwise().sum() / r).sqrt().transpose();
}

Vector empirical_coverage(const Matrix& lo, const Matrix& hi, const Matrix& truths) {
  if (lo.rows() != truths.rows() || lo.cols() != truths.cols() || hi.rows() != truths.rows() ||
      hi.cols() != truths.cols()) {
    throw std::invalid_argument("empirical_coverage: shape mismatch");
  }
  if (lo.rows() == 0) throw std::invalid_argument("empirical_coverage: no replicates");
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("empirical_coverage: lo > hi");
  }
  const double r = static_cast<double>(truths.rows());
  Vector cover = Vector::Zero(truths.cols());
  for (Index j = 0; j < truths.cols(); ++j) {
    long hits = 0;
    for (Index i = 0; i < truths.rows(); ++i) {
      if (lo(i, j) <= truths(i, j) && truths(i, j) <= hi(i, j)) ++hits;
    }
    cover(j) = static_cast<double>(hits) / r;
  }
  return cover;
}

EssResult ess(const Vector& draws) {
  const Index n = draws.size();
  if (n < 10) throw std::invalid_argument("ess: need at least 10 draws");
  EssResult result;
  const double mean = draws.mean();
  const Vector x = draws.array() - mean;
  const double var = x.squaredNorm() / static_cast<double>(n - 1);
  if (!(var > 0.0)) {
    result.constant = true;
    return result;
  }

  // Yule-Walker AR fit with AIC order selection (Levinson-Durbin recursion),
  // then spec0 = sigma^2 / (1 - sum(phi))^2.
  const int max_order =
      std::min<int>(static_cast<int>(10.0 * std::log10(static_cast<double>(n))), n / 2 - 1);
  std::vector<double> acov(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int lag = 0; lag <= max_order; ++lag) {
    double s = 0.0;
    for (Index t = lag; t < n; ++t) s += x(t) * x(t - lag);
    acov[static_cast<std::size_t>(lag)] = s / static_cast<double>(n);
  }

  std::vector<double> phi(static_cast<std::size_t>(max_order) + 1, 0.0);
  std::vector<double> prev(phi);
  double sigma2 = acov[0];
  double best_aic = static_cast<double>(n) * std::log(sigma2);  // order 0
  double best_spec0 = acov[0];
  for (int order = 1; order <= max_order; ++order) {
    double num = acov[static_cast<std::size_t>(order)];
    for (int j = 1; j < order; ++j) {
      num -= prev[static_cast<std::size_t>(j)] * acov[static_cast<std::size_t>(order - j)];
    }
    const double reflect = num / sigma2;
    phi = prev;
    phi[static_cast<std::size_t>(order)] = reflect;
    for (int j = 1; j < order; ++j) {
      phi[static_cast<std::size_t>(j)] =
          prev[static_cast<std::size_t>(j)] - reflect * prev[static_cast<std::size_t>(order - j)];
    }
    sigma2 *= (1.0 - reflect * reflect);
    if (!(sigma2 > 0.0)) break;
    const double aic = static_cast<double>(n) * std::log(sigma2) + 2.0 * order;
    if (aic < best_aic) {
      best_aic = aic;
      double phi_sum = 0.0;
      for (int j = 1; j <= order; ++j) phi_sum += phi[static_cast<std::size_t>(j)];
      const double denom = 1.0 - phi_sum;
      best_spec0 = denom != 0.0 ? sigma2 / (denom * denom) : acov[0] * static_cast<double>(n);
    }
    prev = phi;
  }

  result.raw = static_cast<double>(n) * var / best_spec0;
  result.value = result.raw;
  if (result.value > static_cast<double>(n)) {
    result.value = static_cast<double>(n);
    result.clamped = true;
  }
  if (result.value < 0.0) result.value = 0.0;
  return result;
}

GelmanRubinResult gelman_rubin(const Matrix& chains) {
  const Index m = chains.rows();
  const Index n = chains.cols();
  if (m < 2 || n < 10) throw std::invalid_argument("gelman_rubin: need >= 2 chains of >= 10");
  GelmanRubinResult result;
  Vector means(m);
  double w = 0.0;
  for (Index j = 0; j < m; ++j) {
    means(j) = chains.row(j).mean();
    w += (chains.row(j).array() - means(j)).square().sum() / static_cast<double>(n - 1);
  }
  w /= static_cast<double>(m);
  if (!(w > 0.0)) {
    result.degenerate = true;
    return result;
  }
  const double grand = means.mean();
  const double b =
      static_cast<double>(n) * (means.array() - grand).square().sum() / static_cast<double>(m - 1);
  result.r_hat = std::sqrt(1.0 + b / (static_cast<double>(n) * w));
  return result;
}

double quantile(const Vector& draws, double p) {
  const Index n = draws.size();
  if (n == 0) throw std::invalid_argument("quantile: empty draws");
  std::vector<double> sorted(draws.data(), draws.data() + n);
  std::sort(sorted.begin(), sorted.end());
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(n) - 1.0) * p;
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

PosteriorSummary summarize(const std::string& name, const Vector& draws) {
  if (draws.size() == 0) throw std::invalid_argument("summarize: empty draws");
  PosteriorSummary s;
  s.name = name;
  s.mean = draws.mean();
  s.sd = draws.size() > 1
             ? std::sqrt((draws.array() - s.mean).square().sum() /
                         static_cast<double>(draws.size() - 1))
             : 0.0;
  s.q025 = quantile(draws, 0.025);
  s.q05 = quantile(draws, 0.05);
  s.q50 = quantile(draws, 0.5);
  s.q95 = quantile(draws, 0.95);
  s.q975 = quantile(draws, 0.975);
  s.ess = draws.size() >= 10 ? ess(draws).value : static_cast<double>(draws.size());
  return s;
}

}  // namespace srecop
