#pragma once

#include <map>
#include <string>

namespace srecop {

/// Parameter-model prior, evaluated on the natural scale; the MH kernel adds
/// the transform Jacobian itself. Gamma and truncated-Gamma are shape/scale,
/// the Gaussian is mean/variance, the half-Cauchy has a scale parameter.
struct Prior {
  enum class Kind { HalfCauchy, Gaussian, Gamma, TruncatedGamma };

  Kind kind = Kind::Gaussian;
  double a = 0.0;      // scale | mean | shape
  double b = 1.0;      // unused | variance | scale
  double lower = 0.0;  // truncation bound (TruncatedGamma)

  static Prior half_cauchy(double scale);
  static Prior gaussian(double mean, double variance);
  static Prior gamma(double shape, double scale);
  static Prior truncated_gamma(double shape, double scale, double lower);

  /// "half_cauchy 0.1" | "gaussian 0 10000" | "gamma 4 2"
  /// | "truncated_gamma 3 2 2"
  static Prior parse(const std::string& text);
  std::string describe() const;

  bool in_support(double x) const;
  double log_pdf(double x) const;
  double quantile(double u) const;
  double median() const { return quantile(0.5); }
};

/// Priors keyed by parameter name (sigma_p, beta0, lambda, theta_s, theta_r,
/// nu); the multi-resolution theta_s components share the theta_s entry.
class PriorSet {
 public:
  void set(const std::string& name, Prior prior) { priors_[name] = prior; }
  const Prior& at(const std::string& name) const;
  bool has(const std::string& name) const { return priors_.count(name) > 0; }

  /// Weakly informative defaults used in the simulation studies.
  static PriorSet defaults_lg();
  static PriorSet defaults_sg();

 private:
  std::map<std::string, Prior> priors_;
};

}  // namespace srecop
