#include "srecop/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srecop/rng.hpp"

namespace srecop::stats {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// Acklam's rational approximation for the inverse normal CDF, refined below
// with one Halley step to full double precision.
double inverse_normal_acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;  // converged to working precision for all uses here
}

// Above roughly 1e5 degrees of freedom the t distribution is replaced by its
// O(1/nu) Gaussian expansion; the neglected terms are O(1/nu^2).
constexpr double kLargeNu = 1e5;

double adaptive_simpson(const IntegrandRef& f, double a, double fa, double m, double fm, double b,
                        double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrtTwoPi; }

double normal_log_pdf(double x) { return -0.5 * (x * x + kLogTwoPi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u outside (0,1)");
  double x = inverse_normal_acklam(u);
  // One Halley step against erfc brings the approximation to ~1e-16.
  const double e = normal_cdf(x) - u;
  const double d = normal_pdf(x);
  x -= e / (d + 0.5 * x * e);
  return x;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double incomplete_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * beta_cf(1.0 - x, b, a) / b;
}

double student_t_log_pdf(double x, double nu) {
  if (nu >= kLargeNu) {
    // log t_nu(x) = log phi(x) + ((x^4 - 2x^2 - 1)/4) / nu + O(1/nu^2)
    return normal_log_pdf(x) + 0.25 * (x * x * (x * x - 2.0) - 1.0) / nu;
  }
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI) -
         0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double student_t_pdf(double x, double nu) { return std::exp(student_t_log_pdf(x, nu)); }

double student_t_cdf(double x, double nu) {
  if (nu >= kLargeNu) {
    return normal_cdf(x) - normal_pdf(x) * (x * x * x + x) / (4.0 * nu);
  }
  const double x2 = x * x;
  const double p = 0.5 * incomplete_beta(nu / (nu + x2), 0.5 * nu, 0.5);
  return x <= 0.0 ? p : 1.0 - p;
}

double student_t_quantile(double u, double nu) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("student_t_quantile: u outside (0,1)");
  const double z = normal_quantile(u);
  if (nu >= kLargeNu) {
    return z + (z * z * z + z) / (4.0 * nu);
  }
  // Hill's expansion as the starting point, then safeguarded Newton.
  double x = z + (z * z * z + z) / (4.0 * nu) +
             (5.0 * z * z * z * z * z + 16.0 * z * z * z + 3.0 * z) / (96.0 * nu * nu);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  // Expand a bracket around the starting point; for small nu the expansion
  // undershoots far tails badly (the true quantile has |x| ~ u^{-1/nu}).
  double step = 1.0 + std::fabs(x);
  double at = x;
  if (student_t_cdf(at, nu) < u) {
    lo = at;
    while (true) {
      at += step;
      if (student_t_cdf(at, nu) >= u) {
        hi = at;
        break;
      }
      lo = at;
      step *= 2.0;
    }
  } else {
    hi = at;
    while (true) {
      at -= step;
      if (student_t_cdf(at, nu) < u) {
        lo = at;
        break;
      }
      hi = at;
      step *= 2.0;
    }
  }
  x = std::min(std::max(x, lo), hi);
  for (int it = 0; it < 100; ++it) {
    const double err = student_t_cdf(x, nu) - u;
    if (err > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double deriv = student_t_pdf(x, nu);
    double next = x - err / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double change = std::fabs(next - x);
    x = next;
    if (change <= 1e-14 * (1.0 + std::fabs(x))) break;
  }
  return x;
}

double regularized_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (a <= 0.0) throw std::domain_error("regularized_gamma_p: a <= 0");
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // series expansion
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-16) break;
    }
    return std::exp(log_front) * sum;
  }
  // continued fraction for Q(a, x), modified Lentz
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_front) * h;
}

double gamma_quantile(double p, double shape, double scale) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gamma_quantile: p outside (0,1)");
  // Wilson-Hilferty start, then safeguarded Newton on P(shape, x).
  const double z = normal_quantile(p);
  const double g = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
  double x = std::max(shape * g * g * g, 1e-12 * shape);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double err = regularized_gamma_p(shape, x) - p;
    if (err > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double log_pdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
    double next = x - err / std::exp(log_pdf);
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    }
    const double change = std::fabs(next - x);
    x = next;
    if (change <= 1e-13 * (1.0 + x)) break;
  }
  return scale * x;
}

double chi_square_sf(double x, double dof) { return 1.0 - regularized_gamma_p(0.5 * dof, 0.5 * x); }

double gamma_log_pdf(double x, double shape, double scale) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

double integrate(const IntegrandRef& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 48);
}

}  // namespace srecop::stats

namespace srecop {

double Rng::normal() { return stats::normal_quantile(uniform()); }

double Rng::gamma(double shape, double scale) {
  if (shape < 1.0) {
    const double boost = std::pow(uniform(), 1.0 / shape);
    return boost * gamma(shape + 1.0, scale);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return scale * d * v;
    }
  }
}

}  // namespace srecop
