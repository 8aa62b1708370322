#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "srecop/basis.hpp"
#include "srecop/copulas.hpp"
#include "srecop/lowrank.hpp"
#include "srecop/marginals.hpp"
#include "srecop/priors.hpp"
#include "srecop/rng.hpp"
#include "srecop/types.hpp"

namespace srecop {

struct ModelSpec {
  MarginalFamily marginal = MarginalFamily::LogGaussian;
  CopulaTag copula = CopulaTag::GauSre;
  bool measurement_error = true;  // false: the NME ablation, data treated as the process

  /// lg-gau | lg-t | sg-gau | sg-t, with an optional -nme suffix.
  static ModelSpec from_string(const std::string& name);
  std::string to_string() const;

  bool has_lambda() const { return marginal == MarginalFamily::SkewGaussian; }
  bool has_nu() const { return copula == CopulaTag::TSre; }
  /// LG marginals pair with the multiplicative LG data model, SG with the
  /// additive Gaussian one.
  DataModelFamily data_model() const {
    return marginal == MarginalFamily::LogGaussian ? DataModelFamily::LogGaussianMultiplicative
                                                   : DataModelFamily::GaussianAdditive;
  }
};

/// Process-model parameters theta_P.
struct ProcessParams {
  double sigma_p = 1.0;
  double beta0 = 0.0;
  double lambda = 0.0;   // SG only
  Vector theta_s;        // one per basis resolution
  double theta_r = 1.0;
  double nu = 4.0;       // t-SRE only, > 2
};

/// Layout and bijective transform between theta_P and the unconstrained MH
/// coordinates: log for sigma_p / theta_s / theta_r, log(nu - 2) for nu,
/// identity for beta0 and lambda.
class ParamMap {
 public:
  ParamMap(const ModelSpec& model, Index resolutions);

  Index dim() const { return static_cast<Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& prior_name(Index i) const { return prior_names_[static_cast<std::size_t>(i)]; }

  Vector to_transformed(const ProcessParams& p) const;
  ProcessParams from_transformed(const Vector& x) const;
  /// log |d theta / d x|, the Jacobian the MH target adds to the log prior.
  double log_jacobian(const Vector& x) const;
  double log_prior(const ProcessParams& p, const PriorSet& priors) const;

 private:
  ModelSpec model_;
  Index resolutions_;
  std::vector<std::string> names_;
  std::vector<std::string> prior_names_;
  std::vector<bool> log_scale_;   // true: coordinate is log(theta) or log(nu-2)
};

/// Robbins-Monro adaptation of a proposal scale toward a target acceptance
/// rate, with the steplength constant of Garthwaite, Fan & Sclove (2016).
class GarthwaiteScale {
 public:
  GarthwaiteScale(double initial_scale, double target_rate, Index dim, long settle = 20);

  double scale() const { return scale_; }
  void update(bool accepted) {
    if (!adapting_) return;
    ++step_;
    const double move = kappa_ * ((accepted ? 1.0 : 0.0) - target_) / (settle_ + step_);
    scale_ *= std::exp(move);
  }
  void set_adapting(bool on) { adapting_ = on; }

 private:
  double scale_;
  double target_;
  double kappa_;
  long settle_;
  long step_ = 0;
  bool adapting_ = true;
};

/// Random-walk Metropolis bookkeeping: empirical covariance of all past
/// states (Welford), a diagonal regularizer of 1e-10, and Garthwaite scale
/// adaptation. The caller owns the chain state and the target evaluation.
class AdaptiveMetropolis {
 public:
  AdaptiveMetropolis(Index dim, double target_rate = 0.24, double initial_scale = 0.0);

  Vector propose(const Vector& x, Rng& rng);
  /// Record the post-step state (accepted or not); adapts covariance + scale.
  void record(const Vector& state, bool accepted);

  double scale() const { return scale_.scale(); }
  double acceptance_rate() const {
    return proposed_ == 0 ? 0.0 : static_cast<double>(accepted_) / proposed_;
  }
  long proposed() const { return proposed_; }
  void set_adapting(bool on) {
    adapting_ = on;
    scale_.set_adapting(on);
  }

 private:
  Index dim_;
  GarthwaiteScale scale_;
  bool adapting_ = true;
  long n_ = 0;
  Vector mean_;
  Matrix m2_;
  Matrix chol_;  // lower factor of (cov + 1e-10 I)
  bool chol_valid_ = false;
  long accepted_ = 0;
  long proposed_ = 0;
};

struct FitProblem {
  ModelSpec model;
  std::shared_ptr<const SreStructure> obs;   // S_O rows (K x b)
  std::shared_ptr<const SreStructure> miss;  // S_M rows (L x b)
  std::shared_ptr<const EBuilder> e_builder;
  Vector z;        // observed data, length K
  DataModel data;  // measurement-error model (sigma_o known)
  PriorSet priors;
};

struct FitConfig {
  long iterations = 45000;
  long burn_in = 5000;
  long thin = 4;
  std::uint64_t seed = 1;
  int workers = 1;
  bool adapt = true;
  bool predict_missing = true;        // sample Y_M on stored iterations
  bool tabulate_sg = true;            // 101-knot spline CDF/quantile for SG marginals
  std::vector<Index> store_obs;       // subset of 0..K-1 to store (empty: all)
  std::vector<Index> store_miss;      // subset of 0..L-1 to store (empty: all)

  long stored_draws() const {
    if (iterations <= burn_in || thin <= 0) return 0;
    return (iterations - burn_in + thin - 1) / thin;
  }
};

struct ChainOutput {
  std::vector<std::string> param_names;
  Matrix theta;   // draws x dim, natural scale
  Matrix eta;     // draws x b
  Vector gamma;   // draws (t models; empty otherwise)
  Matrix y_obs;   // draws x |stored obs|
  Matrix y_miss;  // draws x |stored miss|
  std::vector<Index> obs_ids;   // subset indices of stored columns
  std::vector<Index> miss_ids;
  double theta_acceptance = 0.0;
  double latent_acceptance = 0.0;
  double theta_scale = 0.0;
  std::uint64_t clamp_events = 0;
  double seconds = 0.0;
  long iterations = 0, burn_in = 0, thin = 0;
  std::vector<std::string> warnings;
};

/// Metropolis-within-Gibbs sampler for the copula-based SRE models. One
/// sweep runs the block schedule
///   Y_O update -> (gamma draw ->) eta draw -> theta update
/// with per-BAU latent updates that are mutually independent given eta and
/// run data-parallel on persistent per-BAU RNG streams, making output
/// independent of the worker count.
class Sampler {
 public:
  Sampler(FitProblem problem, const ProcessParams& initial, const FitConfig& config);

  void sweep();
  ChainOutput run();

  // individual blocks, exposed for verification
  void update_latent_obs();
  void draw_mix_scale();                    // gamma | rest (t models)
  void draw_coefficients();                 // eta | rest (eta-bar for t models)
  bool update_theta();
  Vector predict_missing();                 // one draw of Y_M given the current state

  /// Collapsed theta target (eta and gamma integrated out) on the
  /// transformed scale: log [Y_O | theta] + log [theta] + log-Jacobian.
  double log_target(const Vector& transformed);

  /// Shape and rate of [gamma | rest].
  std::pair<double, double> mix_scale_full_conditional() const;

  const ProcessParams& theta() const { return theta_; }
  const Vector& y_obs() const { return y_; }
  void set_y_obs(const Vector& y);
  void set_data(const Vector& z);
  /// theta_P on the natural scale, in ParamMap order.
  Vector natural_parameters() const;
  const Vector& eta() const { return eta_; }
  double mix_scale() const { return gamma_; }
  void set_mix_scale(double gamma) { gamma_ = gamma; }
  const ParamMap& param_map() const { return map_; }
  const Marginal& marginal() const { return marginal_; }
  const SreCovariance& obs_covariance() const { return *cov_obs_; }
  double latent_acceptance_rate() const;
  double theta_acceptance_rate() const { return theta_mh_.acceptance_rate(); }
  AdaptiveMetropolis& theta_mh() { return theta_mh_; }
  void set_adapting(bool on);

 private:
  struct ThetaArtifacts {
    ProcessParams params;
    Marginal marginal = Marginal::log_gaussian(0.0, 1.0);
    Matrix e;
    std::unique_ptr<SreCovariance> cov_obs;
    Vector sd_obs;
    Vector u, q;             // marginal probabilities and standardized scores of y
    double sum_log_marginal = 0.0;
  };

  bool build_artifacts(const ProcessParams& params, ThetaArtifacts* out) const;
  double copula_log_density_cached(double nu, const Vector& sd, const Vector& q,
                                   const SreCovariance& cov) const;
  void refresh_missing_covariance();
  double standard_quantile(double u) const;  // Phi^{-1} or T_nu^{-1} at current nu
  double standard_cdf(double x) const;

  FitProblem problem_;
  FitConfig config_;
  ParamMap map_;

  ProcessParams theta_;
  Vector transformed_;
  Marginal marginal_ = Marginal::log_gaussian(0.0, 1.0);
  Matrix e_;
  std::unique_ptr<SreCovariance> cov_obs_;
  Vector sd_obs_;
  std::unique_ptr<SreCovariance> cov_miss_;
  Vector sd_miss_;
  bool miss_fresh_ = false;

  Vector y_, u_, q_;  // latent values, marginal probabilities, standardized scores
  Vector eta_;
  double gamma_ = 1.0;

  Rng main_rng_;
  std::vector<Rng> obs_rng_;
  std::vector<Rng> miss_rng_;

  // per-BAU random-walk scales (log) with scalar Garthwaite adaptation
  std::vector<double> latent_step_;
  std::vector<long> latent_accepted_;
  long latent_proposed_rounds_ = 0;
  long adapt_round_ = 0;
  bool adapting_latent_ = true;

  AdaptiveMetropolis theta_mh_;
  mutable std::atomic<std::uint64_t> clamp_events_{0};
};

/// Data-driven starting values: moments for beta0 / sigma_p / lambda, a
/// robust Cressie-Hawkins semivariogram fit for theta_s / theta_r (prior
/// medians when K < 30), nu = 10, per the simulation-study protocol.
ProcessParams initialize(const Vector& z, const std::vector<Point>& obs_coords,
                         const ModelSpec& model, const PriorSet& priors, Index resolutions,
                         Metric metric, double dist_scale, double domain_diameter,
                         std::vector<std::string>* warnings = nullptr);

/// Initial latent values: the data clamped into the marginal support.
Vector initial_latent(const Vector& z, const ModelSpec& model, double beta0);

}  // namespace srecop
