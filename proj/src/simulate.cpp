#include "srecop/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "srecop/parallel.hpp"
#include "srecop/stats.hpp"

namespace srecop {

double ScenarioSpec::sigma_o_value() const {
  const double value =
      sigma_o_rule >= 0.0 ? std::sqrt(sigma_o_rule) * truth.sigma_p : sigma_o;
  if (!(value > 0.0) && model.measurement_error) {
    throw std::invalid_argument("ScenarioSpec: sigma_o must be > 0");
  }
  return value;
}

SimulatedReplicate simulate_replicate(const ScenarioSpec& spec, const SreCovariance& full_cov,
                                      const Matrix& e, const MissingnessPartition& part, int r,
                                      int workers) {
  const Index n = full_cov.rows();
  const Index b = full_cov.rank();
  if (static_cast<Index>(part.observed.size() + part.missing.size()) != n) {
    throw std::invalid_argument("simulate_replicate: partition does not cover the grid");
  }

  Rng rng(spec.seed + static_cast<std::uint64_t>(r), 3);
  SimulatedReplicate rep;
  rep.gamma = 1.0;
  if (spec.model.copula == CopulaTag::TSre) {
    rep.gamma = rng.gamma(0.5 * spec.truth.nu, 2.0 / spec.truth.nu);
  }

  // eta ~ MVG(0, E) (eta-bar = eta / sqrt(gamma) for the t models)
  Eigen::LLT<Matrix> e_llt(e);
  if (e_llt.info() != Eigen::Success) {
    throw std::runtime_error("simulate_replicate: E factorization failed");
  }
  Vector zn(b);
  for (Index i = 0; i < b; ++i) zn(i) = rng.normal();
  rep.eta = (e_llt.matrixL() * zn) / std::sqrt(rep.gamma);

  const Marginal marginal =
      spec.model.marginal == MarginalFamily::LogGaussian
          ? Marginal::log_gaussian(spec.truth.beta0, spec.truth.sigma_p)
          : Marginal::skew_gaussian(spec.truth.beta0, spec.truth.sigma_p, spec.truth.lambda);
  const Vector sd = full_cov.diagonal_sd();
  const bool t_copula = spec.model.copula == CopulaTag::TSre;
  const double nu = spec.truth.nu;
  const double noise_sd = 1.0 / std::sqrt(rep.gamma);

  rep.y.resize(n);
  parallel_for(n, workers, [&](Index j) {
    Rng coord_rng(spec.seed + static_cast<std::uint64_t>(r), 4, static_cast<std::uint64_t>(j));
    const double w = full_cov.basis().row(j).dot(rep.eta) + noise_sd * coord_rng.normal();
    const double x = w / sd(j);
    const double u = clamp_uniform(t_copula ? stats::student_t_cdf(x, nu) : stats::normal_cdf(x));
    rep.y(j) = marginal.quantile(u);
  });

  const Index k = static_cast<Index>(part.observed.size());
  rep.z.resize(k);
  const double sigma_o = spec.model.measurement_error ? spec.sigma_o_value() : 0.0;
  const DataModelFamily data_family = spec.model.data_model();
  for (Index i = 0; i < k; ++i) {
    const double y = rep.y(part.observed[static_cast<std::size_t>(i)]);
    rep.z(i) = spec.model.measurement_error ? draw_datum(y, data_family, sigma_o, rng) : y;
  }
  return rep;
}

}  // namespace srecop
