#include "srecop/copulas.hpp"

#include <cmath>
#include <stdexcept>

#include "srecop/stats.hpp"

namespace srecop {

CopulaFamily CopulaFamily::t(double nu) {
  if (!(nu > 2.0)) throw std::invalid_argument("CopulaFamily: nu must be > 2");
  return {CopulaTag::TSre, nu};
}

double clamp_uniform(double u, ClampStats* stats) {
  if (u < kUniformClampEps) {
    if (stats != nullptr) ++stats->clamped;
    return kUniformClampEps;
  }
  if (u > 1.0 - kUniformClampEps) {
    if (stats != nullptr) ++stats->clamped;
    return 1.0 - kUniformClampEps;
  }
  return u;
}

Vector gau_anamorphosis(const Vector& y, const Marginal& marginal, const Vector& sre_sd,
                        ClampStats* stats) {
  if (y.size() != sre_sd.size()) throw std::invalid_argument("gau_anamorphosis: size mismatch");
  Vector w(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    const double u = clamp_uniform(marginal.cdf(y(j)), stats);
    w(j) = sre_sd(j) * stats::normal_quantile(u);
  }
  return w;
}

Vector gau_anamorphosis_inverse(const Vector& w, const Marginal& marginal, const Vector& sre_sd) {
  if (w.size() != sre_sd.size()) {
    throw std::invalid_argument("gau_anamorphosis_inverse: size mismatch");
  }
  Vector y(w.size());
  for (Index j = 0; j < w.size(); ++j) {
    y(j) = marginal.quantile(clamp_uniform(stats::normal_cdf(w(j) / sre_sd(j))));
  }
  return y;
}

Vector t_anamorphosis(const Vector& y, const Marginal& marginal, const Vector& sre_sd, double nu,
                      ClampStats* stats) {
  if (y.size() != sre_sd.size()) throw std::invalid_argument("t_anamorphosis: size mismatch");
  Vector v(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    const double u = clamp_uniform(marginal.cdf(y(j)), stats);
    v(j) = sre_sd(j) * stats::student_t_quantile(u, nu);
  }
  return v;
}

Vector t_anamorphosis_inverse(const Vector& v, const Marginal& marginal, const Vector& sre_sd,
                              double nu) {
  if (v.size() != sre_sd.size()) {
    throw std::invalid_argument("t_anamorphosis_inverse: size mismatch");
  }
  Vector y(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    y(j) = marginal.quantile(clamp_uniform(stats::student_t_cdf(v(j) / sre_sd(j), nu)));
  }
  return y;
}

namespace {

// log density of MVG(0, Sigma) at w through the low-rank solves
double mvg_log_density(const Vector& w, const SreCovariance& cov) {
  const double k = static_cast<double>(w.size());
  return -0.5 * (k * stats::kLogTwoPi + cov.log_det() + cov.quadratic_form(w));
}

double mvt_log_density(const Vector& v, const SreCovariance& cov, double nu) {
  const double k = static_cast<double>(v.size());
  const double q = cov.quadratic_form(v);
  return std::lgamma(0.5 * (nu + k)) - std::lgamma(0.5 * nu) - 0.5 * k * std::log(nu * M_PI) -
         0.5 * cov.log_det() - 0.5 * (nu + k) * std::log1p(q / nu);
}

}  // namespace

double gau_sre_copula_log_density(const Vector& u, const SreCovariance& cov, ClampStats* stats) {
  if (u.size() != cov.rows()) {
    throw std::invalid_argument("gau_sre_copula_log_density: size mismatch");
  }
  const Vector sd = cov.diagonal_sd();
  Vector w(u.size());
  double log_jacobian = 0.0;
  for (Index j = 0; j < u.size(); ++j) {
    const double q = stats::normal_quantile(clamp_uniform(u(j), stats));
    w(j) = sd(j) * q;
    log_jacobian += stats::normal_log_pdf(q) - std::log(sd(j));
  }
  return mvg_log_density(w, cov) - log_jacobian;
}

double t_sre_copula_log_density(const Vector& u, const SreCovariance& cov, double nu,
                                ClampStats* stats) {
  if (u.size() != cov.rows()) {
    throw std::invalid_argument("t_sre_copula_log_density: size mismatch");
  }
  if (!(nu > 2.0)) throw std::invalid_argument("t_sre_copula_log_density: nu must be > 2");
  const Vector sd = cov.diagonal_sd();
  Vector v(u.size());
  double log_jacobian = 0.0;
  for (Index j = 0; j < u.size(); ++j) {
    const double q = stats::student_t_quantile(clamp_uniform(u(j), stats), nu);
    v(j) = sd(j) * q;
    log_jacobian += stats::student_t_log_pdf(q, nu) - std::log(sd(j));
  }
  return mvt_log_density(v, cov, nu) - log_jacobian;
}

double process_log_density(const Vector& y, const Marginal& marginal, const CopulaFamily& copula,
                           const SreCovariance& cov, ClampStats* stats) {
  if (y.size() != cov.rows()) throw std::invalid_argument("process_log_density: size mismatch");
  double sum_marginal = 0.0;
  Vector u(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    sum_marginal += marginal.log_pdf(y(j));
    u(j) = marginal.cdf(y(j));
  }
  const double copula_term = copula.tag == CopulaTag::GauSre
                                 ? gau_sre_copula_log_density(u, cov, stats)
                                 : t_sre_copula_log_density(u, cov, copula.nu, stats);
  return sum_marginal + copula_term;
}

}  // namespace srecop
