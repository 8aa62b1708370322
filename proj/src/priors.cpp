#include "srecop/priors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "srecop/stats.hpp"

namespace srecop {

Prior Prior::half_cauchy(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("half_cauchy: scale must be > 0");
  return {Kind::HalfCauchy, scale, 0.0, 0.0};
}

Prior Prior::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian prior: variance must be > 0");
  return {Kind::Gaussian, mean, variance, 0.0};
}

Prior Prior::gamma(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw std::invalid_argument("gamma prior: bad parameters");
  return {Kind::Gamma, shape, scale, 0.0};
}

Prior Prior::truncated_gamma(double shape, double scale, double lower) {
  if (!(shape > 0.0 && scale > 0.0) || lower < 0.0) {
    throw std::invalid_argument("truncated_gamma prior: bad parameters");
  }
  return {Kind::TruncatedGamma, shape, scale, lower};
}

Prior Prior::parse(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  double a = 0.0, b = 0.0, c = 0.0;
  if (kind == "half_cauchy") {
    if (!(in >> a)) throw std::invalid_argument("prior parse: half_cauchy needs a scale");
    return half_cauchy(a);
  }
  if (kind == "gaussian") {
    if (!(in >> a >> b)) throw std::invalid_argument("prior parse: gaussian needs mean variance");
    return gaussian(a, b);
  }
  if (kind == "gamma") {
    if (!(in >> a >> b)) throw std::invalid_argument("prior parse: gamma needs shape scale");
    return gamma(a, b);
  }
  if (kind == "truncated_gamma") {
    if (!(in >> a >> b >> c)) {
      throw std::invalid_argument("prior parse: truncated_gamma needs shape scale lower");
    }
    return truncated_gamma(a, b, c);
  }
  throw std::invalid_argument("prior parse: unknown prior kind '" + kind + "'");
}

std::string Prior::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::HalfCauchy: out << "half_cauchy " << a; break;
    case Kind::Gaussian: out << "gaussian " << a << " " << b; break;
    case Kind::Gamma: out << "gamma " << a << " " << b; break;
    case Kind::TruncatedGamma: out << "truncated_gamma " << a << " " << b << " " << lower; break;
  }
  return out.str();
}

bool Prior::in_support(double x) const {
  switch (kind) {
    case Kind::HalfCauchy: return x > 0.0;
    case Kind::Gaussian: return std::isfinite(x);
    case Kind::Gamma: return x > 0.0;
    case Kind::TruncatedGamma: return x > lower;
  }
  return false;
}

double Prior::log_pdf(double x) const {
  if (!in_support(x)) return -std::numeric_limits<double>::infinity();
  switch (kind) {
    case Kind::HalfCauchy: {
      const double r = x / a;
      return std::log(2.0 / M_PI) - std::log(a) - std::log1p(r * r);
    }
    case Kind::Gaussian: {
      const double r = x - a;
      return -0.5 * (r * r / b + std::log(2.0 * M_PI * b));
    }
    case Kind::Gamma:
      return stats::gamma_log_pdf(x, a, b);
    case Kind::TruncatedGamma: {
      const double log_tail = std::log1p(-stats::regularized_gamma_p(a, lower / b));
      return stats::gamma_log_pdf(x, a, b) - log_tail;
    }
  }
  return -std::numeric_limits<double>::infinity();
}

double Prior::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("prior quantile: u outside (0,1)");
  switch (kind) {
    case Kind::HalfCauchy:
      return a * std::tan(0.5 * M_PI * u);
    case Kind::Gaussian:
      return a + std::sqrt(b) * stats::normal_quantile(u);
    case Kind::Gamma:
      return stats::gamma_quantile(u, a, b);
    case Kind::TruncatedGamma: {
      const double p_lower = stats::regularized_gamma_p(a, lower / b);
      return stats::gamma_quantile(p_lower + u * (1.0 - p_lower), a, b);
    }
  }
  return 0.0;
}

const Prior& PriorSet::at(const std::string& name) const {
  const auto it = priors_.find(name);
  if (it == priors_.end()) throw std::invalid_argument("missing prior for parameter " + name);
  return it->second;
}

PriorSet PriorSet::defaults_lg() {
  PriorSet p;
  p.set("sigma_p", Prior::half_cauchy(0.1));
  p.set("beta0", Prior::gaussian(0.0, 100.0 * 100.0));
  p.set("theta_s", Prior::gamma(4.0, 2.0));
  p.set("theta_r", Prior::half_cauchy(0.25));
  p.set("nu", Prior::truncated_gamma(3.0, 2.0, 2.0));
  return p;
}

PriorSet PriorSet::defaults_sg() {
  PriorSet p = defaults_lg();
  p.set("sigma_p", Prior::half_cauchy(1000.0));
  p.set("lambda", Prior::gaussian(0.0, 4.0 * 4.0));
  return p;
}

}  // namespace srecop
