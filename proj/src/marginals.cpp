#include "srecop/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srecop/rng.hpp"
#include "srecop/stats.hpp"

namespace srecop {

namespace {
constexpr double kTableEps = 1e-6;    // quantile range covered by the tables
constexpr int kTableKnots = 101;
constexpr double kSgTail = 9.5;       // integration cut-off in omega units
constexpr double kQuadTol = 1e-13;

double sg_pdf_std(double z, double lambda) {
  return 2.0 * stats::normal_pdf(z) * stats::normal_cdf(lambda * z);
}

// Unit-width panels keep the adaptive rule from stepping straight over the
// density bump when the interval is mostly flat zero.
double integrate_panels(const stats::IntegrandRef& f, double a, double b, double tol) {
  const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    total += stats::integrate(f, a + i * h, a + (i + 1) * h, tol / panels);
  }
  return total;
}
}  // namespace

MarginalFamily marginal_family_from_string(const std::string& name) {
  if (name == "lg" || name == "log-gaussian") return MarginalFamily::LogGaussian;
  if (name == "sg" || name == "skew-gaussian") return MarginalFamily::SkewGaussian;
  throw std::invalid_argument("unknown marginal family: " + name);
}

SkewGaussianParams sg_params_from_moments(double mean, double var, double lambda) {
  if (!(var > 0.0)) throw std::invalid_argument("sg_params_from_moments: var must be > 0");
  const double zeta = lambda / std::sqrt(1.0 + lambda * lambda);
  SkewGaussianParams p;
  p.lambda = lambda;
  p.omega = std::sqrt(var / (1.0 - 2.0 * zeta * zeta / M_PI));
  p.psi = mean - p.omega * zeta * std::sqrt(2.0 / M_PI);
  return p;
}

MonotoneSpline::MonotoneSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneSpline: need >= 2 knots");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("MonotoneSpline: knots must be increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  slope_[0] = delta[0];
  slope_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
}

double MonotoneSpline::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

Marginal Marginal::log_gaussian(double beta0, double sigma_p) {
  if (!(sigma_p > 0.0)) throw std::invalid_argument("log_gaussian: sigma_p must be > 0");
  Marginal m;
  m.family_ = MarginalFamily::LogGaussian;
  m.beta0_ = beta0;
  m.sigma_p_ = sigma_p;
  m.log_mu_ = beta0 - 0.5 * sigma_p * sigma_p;
  return m;
}

Marginal Marginal::skew_gaussian(double beta0, double sigma_p, double lambda, bool tabulate) {
  if (!(sigma_p > 0.0)) throw std::invalid_argument("skew_gaussian: sigma_p must be > 0");
  Marginal m;
  m.family_ = MarginalFamily::SkewGaussian;
  m.beta0_ = beta0;
  m.sigma_p_ = sigma_p;
  m.lambda_ = lambda;
  m.sg_ = sg_params_from_moments(std::exp(beta0), sigma_p * sigma_p, lambda);
  if (tabulate) m.build_tables();
  return m;
}

double Marginal::mean() const { return std::exp(beta0_); }

double Marginal::variance() const {
  if (family_ == MarginalFamily::LogGaussian) {
    return std::exp(2.0 * beta0_) * std::expm1(sigma_p_ * sigma_p_);
  }
  return sigma_p_ * sigma_p_;
}

double Marginal::pdf(double y) const {
  if (family_ == MarginalFamily::LogGaussian) {
    if (y <= 0.0) return 0.0;
    const double z = (std::log(y) - log_mu_) / sigma_p_;
    return stats::normal_pdf(z) / (y * sigma_p_);
  }
  const double z = (y - sg_.psi) / sg_.omega;
  return sg_pdf_std(z, lambda_) / sg_.omega;
}

double Marginal::log_pdf(double y) const {
  if (family_ == MarginalFamily::LogGaussian) {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    const double ly = std::log(y);
    const double z = (ly - log_mu_) / sigma_p_;
    return stats::normal_log_pdf(z) - ly - std::log(sigma_p_);
  }
  const double z = (y - sg_.psi) / sg_.omega;
  const double tail = stats::normal_cdf(lambda_ * z);
  if (tail <= 0.0) return -std::numeric_limits<double>::infinity();
  return M_LN2 + stats::normal_log_pdf(z) + std::log(tail) - std::log(sg_.omega);
}

double Marginal::cdf_exact(double y) const {
  if (family_ == MarginalFamily::LogGaussian) {
    if (y <= 0.0) return 0.0;
    return stats::normal_cdf((std::log(y) - log_mu_) / sigma_p_);
  }
  const double z = (y - sg_.psi) / sg_.omega;
  if (z <= -kSgTail) return 0.0;
  if (z >= kSgTail) return 1.0;
  const auto pdf_std = [this](double t) { return sg_pdf_std(t, lambda_); };
  if (z < -3.0) {
    return integrate_panels(pdf_std, -kSgTail, z, kQuadTol);
  }
  if (z > 3.0) {
    return 1.0 - integrate_panels(pdf_std, z, kSgTail, kQuadTol);
  }
  // anchored at psi: F(psi) = 1/2 - atan(lambda)/pi
  const double at_psi = 0.5 - std::atan(lambda_) / M_PI;
  return at_psi + stats::integrate(pdf_std, 0.0, z, kQuadTol);
}

double Marginal::quantile_exact(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
  if (family_ == MarginalFamily::LogGaussian) {
    return std::exp(log_mu_ + sigma_p_ * stats::normal_quantile(u));
  }
  // Safeguarded Newton in standardized coordinates; the Gaussian quantile is
  // a usable starting point for all lambda.
  double z = stats::normal_quantile(u);
  double lo = -kSgTail, hi = kSgTail;
  const auto cdf_std = [this](double t) { return cdf_exact(sg_.psi + sg_.omega * t); };
  for (int it = 0; it < 100; ++it) {
    const double err = cdf_std(z) - u;
    if (err > 0.0) {
      hi = std::min(hi, z);
    } else {
      lo = std::max(lo, z);
    }
    const double deriv = sg_pdf_std(z, lambda_);
    double next = deriv > 0.0 ? z - err / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double change = std::fabs(next - z);
    z = next;
    if (change <= 1e-13 * (1.0 + std::fabs(z))) break;
  }
  return sg_.psi + sg_.omega * z;
}

double Marginal::cdf(double y) const {
  if (cdf_spline_ && y > table_lo_ && y < table_hi_) return (*cdf_spline_)(y);
  return cdf_exact(y);
}

double Marginal::quantile(double u) const {
  if (quantile_spline_ && u > kTableEps && u < 1.0 - kTableEps) return (*quantile_spline_)(u);
  return quantile_exact(u);
}

void Marginal::build_tables() {
  table_lo_ = quantile_exact(kTableEps);
  table_hi_ = quantile_exact(1.0 - kTableEps);
  std::vector<double> ys(kTableKnots), us(kTableKnots);
  const double step = (table_hi_ - table_lo_) / (kTableKnots - 1);
  for (int i = 0; i < kTableKnots; ++i) {
    ys[static_cast<std::size_t>(i)] = table_lo_ + i * step;
  }
  // One cumulative pass instead of 101 independent quadratures.
  us[0] = kTableEps;
  const auto pdf_here = [this](double t) { return pdf(t); };
  for (int i = 1; i < kTableKnots; ++i) {
    us[static_cast<std::size_t>(i)] =
        us[static_cast<std::size_t>(i - 1)] +
        stats::integrate(pdf_here, ys[static_cast<std::size_t>(i - 1)],
                         ys[static_cast<std::size_t>(i)], kQuadTol);
  }
  for (auto& u : us) u = std::min(u, 1.0 - 1e-12);
  cdf_spline_ = std::make_shared<MonotoneSpline>(ys, us);
  quantile_spline_ = std::make_shared<MonotoneSpline>(std::move(us), std::move(ys));
}

double data_log_lik(double z, double y, DataModelFamily family, double sigma_o) {
  if (family == DataModelFamily::GaussianAdditive) {
    const double r = (z - y) / sigma_o;
    return stats::normal_log_pdf(r) - std::log(sigma_o);
  }
  if (y <= 0.0 || z <= 0.0) {
    throw std::domain_error("data_log_lik: LG data model requires z, y > 0");
  }
  const double lz = std::log(z);
  const double m = std::log(y) - 0.5 * sigma_o * sigma_o;
  const double r = (lz - m) / sigma_o;
  return stats::normal_log_pdf(r) - lz - std::log(sigma_o);
}

double draw_datum(double y, DataModelFamily family, double sigma_o, Rng& rng) {
  if (family == DataModelFamily::GaussianAdditive) {
    return y + sigma_o * rng.normal();
  }
  if (y <= 0.0) throw std::domain_error("draw_datum: LG data model requires y > 0");
  return std::exp(std::log(y) - 0.5 * sigma_o * sigma_o + sigma_o * rng.normal());
}

}  // namespace srecop
