#pragma once

namespace srecop::stats {

inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kSqrtTwoPi = 2.5066282746310005024;

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double u);

/// Unit-scale ("standardized") Student t on nu > 0 degrees of freedom.
/// Its variance is nu/(nu-2) for nu > 2, not 1; the copula construction
/// depends on this convention and mixing it with the unit-variance scaling
/// silently corrupts every t-copula density.
double student_t_pdf(double x, double nu);
double student_t_log_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double u, double nu);

double log_beta(double a, double b);
double incomplete_beta(double x, double a, double b);  // regularized I_x(a, b)
double regularized_gamma_p(double a, double x);        // lower, P(a, x)
double gamma_quantile(double p, double shape, double scale);
double chi_square_sf(double x, double dof);

double gamma_log_pdf(double x, double shape, double scale);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double integrate(const class IntegrandRef& f, double a, double b, double tol);

/// Type-erased reference to a callable double(double); avoids std::function
/// allocation in the quadrature hot path.
class IntegrandRef {
 public:
  template <typename F>
  IntegrandRef(const F& f)  // NOLINT: implicit by design
      : obj_(&f), call_([](const void* o, double x) { return (*static_cast<const F*>(o))(x); }) {}
  double operator()(double x) const { return call_(obj_, x); }

 private:
  const void* obj_;
  double (*call_)(const void*, double);
};

}  // namespace srecop::stats
