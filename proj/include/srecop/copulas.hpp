#pragma once

#include <cstdint>
#include <string>

#include "srecop/lowrank.hpp"
#include "srecop/marginals.hpp"
#include "srecop/types.hpp"

namespace srecop {

enum class CopulaTag { GauSre, TSre };

struct CopulaFamily {
  CopulaTag tag = CopulaTag::GauSre;
  double nu = 4.0;  // t-SRE degrees of freedom, > 2

  static CopulaFamily gau() { return {CopulaTag::GauSre, 0.0}; }
  static CopulaFamily t(double nu);
};

/// Marginal probabilities are clamped into [eps, 1-eps] before the Gaussian
/// or t quantile is applied; the MCMC only needs finite log-densities. Clamp
/// events are counted for diagnostics.
inline constexpr double kUniformClampEps = 1e-15;

struct ClampStats {
  std::uint64_t clamped = 0;
};

double clamp_uniform(double u, ClampStats* stats = nullptr);

/// Gaussian anamorphosis w_j = sre_sd_j * Phi^{-1}(F(y_j)) and its inverse.
Vector gau_anamorphosis(const Vector& y, const Marginal& marginal, const Vector& sre_sd,
                        ClampStats* stats = nullptr);
Vector gau_anamorphosis_inverse(const Vector& w, const Marginal& marginal, const Vector& sre_sd);

/// t anamorphosis v_j = sre_sd_j * T_nu^{-1}(F(y_j)) and its inverse.
Vector t_anamorphosis(const Vector& y, const Marginal& marginal, const Vector& sre_sd, double nu,
                      ClampStats* stats = nullptr);
Vector t_anamorphosis_inverse(const Vector& v, const Marginal& marginal, const Vector& sre_sd,
                              double nu);

/// Log copula densities at u in (0,1)^K with the SRE covariance parameter.
/// O(K b + b^3) through the low-rank solves.
double gau_sre_copula_log_density(const Vector& u, const SreCovariance& cov,
                                  ClampStats* stats = nullptr);
double t_sre_copula_log_density(const Vector& u, const SreCovariance& cov, double nu,
                                ClampStats* stats = nullptr);

/// Joint process-model log-density: sum of marginal log-pdfs plus the copula
/// log-density at the marginal probabilities. Works identically for full
/// vectors and observed subvectors (pass the row-subset covariance).
double process_log_density(const Vector& y, const Marginal& marginal, const CopulaFamily& copula,
                           const SreCovariance& cov, ClampStats* stats = nullptr);

}  // namespace srecop
