#include "srecop/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srecop/parallel.hpp"
#include "srecop/stats.hpp"
#include "srecop/variogram.hpp"

namespace srecop {

namespace {
constexpr double kLatentTarget = 0.44;   // scalar-proposal optimum
constexpr double kThetaTarget = 0.24;    // multivariate block target
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

ModelSpec ModelSpec::from_string(const std::string& name) {
  ModelSpec spec;
  std::string base = name;
  const std::string nme = "-nme";
  if (base.size() > nme.size() && base.compare(base.size() - nme.size(), nme.size(), nme) == 0) {
    spec.measurement_error = false;
    base = base.substr(0, base.size() - nme.size());
  }
  if (base == "lg-gau") {
    spec.marginal = MarginalFamily::LogGaussian;
    spec.copula = CopulaTag::GauSre;
  } else if (base == "lg-t") {
    spec.marginal = MarginalFamily::LogGaussian;
    spec.copula = CopulaTag::TSre;
  } else if (base == "sg-gau") {
    spec.marginal = MarginalFamily::SkewGaussian;
    spec.copula = CopulaTag::GauSre;
  } else if (base == "sg-t") {
    spec.marginal = MarginalFamily::SkewGaussian;
    spec.copula = CopulaTag::TSre;
  } else {
    throw std::invalid_argument("unknown model: " + name);
  }
  return spec;
}

std::string ModelSpec::to_string() const {
  std::string s = marginal == MarginalFamily::LogGaussian ? "lg" : "sg";
  s += copula == CopulaTag::GauSre ? "-gau" : "-t";
  if (!measurement_error) s += "-nme";
  return s;
}

ParamMap::ParamMap(const ModelSpec& model, Index resolutions)
    : model_(model), resolutions_(resolutions) {
  if (resolutions < 1) throw std::invalid_argument("ParamMap: need >= 1 resolution");
  names_.push_back("sigma_p");
  prior_names_.push_back("sigma_p");
  log_scale_.push_back(true);
  names_.push_back("beta0");
  prior_names_.push_back("beta0");
  log_scale_.push_back(false);
  if (model.has_lambda()) {
    names_.push_back("lambda");
    prior_names_.push_back("lambda");
    log_scale_.push_back(false);
  }
  for (Index p = 0; p < resolutions; ++p) {
    names_.push_back(resolutions == 1 ? "theta_s" : "theta_s_" + std::to_string(p + 1));
    prior_names_.push_back("theta_s");
    log_scale_.push_back(true);
  }
  names_.push_back("theta_r");
  prior_names_.push_back("theta_r");
  log_scale_.push_back(true);
  if (model.has_nu()) {
    names_.push_back("nu");  // transformed as log(nu - 2)
    prior_names_.push_back("nu");
    log_scale_.push_back(true);
  }
}

Vector ParamMap::to_transformed(const ProcessParams& p) const {
  Vector x(dim());
  Index i = 0;
  x(i++) = std::log(p.sigma_p);
  x(i++) = p.beta0;
  if (model_.has_lambda()) x(i++) = p.lambda;
  if (p.theta_s.size() != resolutions_) {
    throw std::invalid_argument("ParamMap: theta_s resolution mismatch");
  }
  for (Index r = 0; r < resolutions_; ++r) x(i++) = std::log(p.theta_s(r));
  x(i++) = std::log(p.theta_r);
  if (model_.has_nu()) x(i++) = std::log(p.nu - 2.0);
  return x;
}

ProcessParams ParamMap::from_transformed(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("ParamMap: dimension mismatch");
  ProcessParams p;
  Index i = 0;
  p.sigma_p = std::exp(x(i++));
  p.beta0 = x(i++);
  if (model_.has_lambda()) p.lambda = x(i++);
  p.theta_s = Vector(resolutions_);
  for (Index r = 0; r < resolutions_; ++r) p.theta_s(r) = std::exp(x(i++));
  p.theta_r = std::exp(x(i++));
  if (model_.has_nu()) p.nu = 2.0 + std::exp(x(i++));
  return p;
}

double ParamMap::log_jacobian(const Vector& x) const {
  double sum = 0.0;
  for (Index i = 0; i < dim(); ++i) {
    if (log_scale_[static_cast<std::size_t>(i)]) sum += x(i);
  }
  return sum;
}

double ParamMap::log_prior(const ProcessParams& p, const PriorSet& priors) const {
  double sum = priors.at("sigma_p").log_pdf(p.sigma_p) + priors.at("beta0").log_pdf(p.beta0);
  if (model_.has_lambda()) sum += priors.at("lambda").log_pdf(p.lambda);
  const Prior& ts = priors.at("theta_s");
  for (Index r = 0; r < resolutions_; ++r) sum += ts.log_pdf(p.theta_s(r));
  sum += priors.at("theta_r").log_pdf(p.theta_r);
  if (model_.has_nu()) sum += priors.at("nu").log_pdf(p.nu);
  return sum;
}

GarthwaiteScale::GarthwaiteScale(double initial_scale, double target_rate, Index dim, long settle)
    : scale_(initial_scale), target_(target_rate), settle_(settle) {
  const double p = target_rate;
  if (dim <= 1) {
    kappa_ = 1.0 / (p * (1.0 - p));
  } else {
    const double d = static_cast<double>(dim);
    const double a = stats::normal_quantile(1.0 - 0.5 * p);
    kappa_ = (1.0 - 1.0 / d) * stats::kSqrtTwoPi * std::exp(0.5 * a * a) / (2.0 * a) +
             1.0 / (d * p * (1.0 - p));
  }
}

AdaptiveMetropolis::AdaptiveMetropolis(Index dim, double target_rate, double initial_scale)
    : dim_(dim),
      scale_(initial_scale > 0.0 ? initial_scale : 2.38 / std::sqrt(static_cast<double>(dim)),
             target_rate, dim),
      mean_(Vector::Zero(dim)),
      m2_(Matrix::Zero(dim, dim)),
      chol_(Matrix::Identity(dim, dim)) {}

Vector AdaptiveMetropolis::propose(const Vector& x, Rng& rng) {
  if (x.size() != dim_) throw std::invalid_argument("AdaptiveMetropolis: dimension mismatch");
  Vector z(dim_);
  for (Index i = 0; i < dim_; ++i) z(i) = rng.normal();
  if (chol_valid_) return x + scale_.scale() * (chol_ * z);
  return x + scale_.scale() * z;
}

void AdaptiveMetropolis::record(const Vector& state, bool accepted) {
  ++proposed_;
  if (accepted) ++accepted_;
  scale_.update(accepted);
  if (!adapting_) return;
  ++n_;
  const Vector delta = state - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (state - mean_).transpose();
  if (n_ > 2 * dim_ + 2) {
    Matrix cov = m2_ / static_cast<double>(n_ - 1);
    cov.diagonal().array() += 1e-10;
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      chol_valid_ = true;
    }
  }
}

Sampler::Sampler(FitProblem problem, const ProcessParams& initial, const FitConfig& config)
    : problem_(std::move(problem)),
      config_(config),
      map_(problem_.model, problem_.e_builder->resolutions()),
      theta_(initial),
      main_rng_(config.seed, 0),
      theta_mh_(map_.dim(), kThetaTarget) {
  const Index k = problem_.obs->s.rows();
  const Index l = problem_.miss ? problem_.miss->s.rows() : 0;
  if (problem_.z.size() != k) throw std::invalid_argument("Sampler: z does not match S_O rows");
  if (problem_.data.sigma_o.size() != 1 && problem_.data.sigma_o.size() != k) {
    throw std::invalid_argument("Sampler: sigma_o must have size 1 or K");
  }
  if ((problem_.data.sigma_o.array() <= 0.0).any()) {
    throw std::invalid_argument("Sampler: sigma_o must be > 0");
  }

  transformed_ = map_.to_transformed(theta_);
  ThetaArtifacts art;
  art.params = theta_;
  y_ = initial_latent(problem_.z, problem_.model, theta_.beta0);
  if (!build_artifacts(theta_, &art)) {
    throw std::runtime_error("Sampler: initial parameters unsupported by the priors");
  }
  marginal_ = art.marginal;
  cov_obs_ = std::move(art.cov_obs);
  sd_obs_ = std::move(art.sd_obs);
  u_ = std::move(art.u);
  q_ = std::move(art.q);
  e_ = std::move(art.e);

  eta_ = Vector::Zero(problem_.obs->s.cols());
  gamma_ = 1.0;

  obs_rng_.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) obs_rng_.emplace_back(config_.seed, 1, static_cast<uint64_t>(i));
  miss_rng_.reserve(static_cast<std::size_t>(l));
  for (Index i = 0; i < l; ++i) miss_rng_.emplace_back(config_.seed, 2, static_cast<uint64_t>(i));

  const double init_step =
      problem_.model.marginal == MarginalFamily::LogGaussian ? 0.5 : theta_.sigma_p;
  latent_step_.assign(static_cast<std::size_t>(k), init_step);
  latent_accepted_.assign(static_cast<std::size_t>(k), 0);
  adapting_latent_ = config_.adapt;
  theta_mh_.set_adapting(config_.adapt);
}

void Sampler::set_adapting(bool on) {
  adapting_latent_ = on;
  theta_mh_.set_adapting(on);
}

void Sampler::set_y_obs(const Vector& y) {
  if (y.size() != y_.size()) throw std::invalid_argument("set_y_obs: size mismatch");
  y_ = y;
  for (Index i = 0; i < y_.size(); ++i) {
    u_(i) = clamp_uniform(marginal_.cdf(y_(i)));
    q_(i) = standard_quantile(u_(i));
  }
}

void Sampler::set_data(const Vector& z) {
  if (z.size() != problem_.z.size()) throw std::invalid_argument("set_data: size mismatch");
  problem_.z = z;
}

double Sampler::standard_quantile(double u) const {
  return problem_.model.copula == CopulaTag::GauSre ? stats::normal_quantile(u)
                                                    : stats::student_t_quantile(u, theta_.nu);
}

double Sampler::standard_cdf(double x) const {
  return problem_.model.copula == CopulaTag::GauSre ? stats::normal_cdf(x)
                                                    : stats::student_t_cdf(x, theta_.nu);
}

bool Sampler::build_artifacts(const ProcessParams& params, ThetaArtifacts* out) const {
  // prior support gate; a violation is an automatic reject, not an error
  if (!(params.sigma_p > 0.0) || !(params.theta_r > 0.0) ||
      (params.theta_s.array() <= 0.0).any()) {
    return false;
  }
  if (problem_.model.has_nu() && !(params.nu > 2.0)) return false;

  out->params = params;
  try {
    out->marginal = problem_.model.marginal == MarginalFamily::LogGaussian
                        ? Marginal::log_gaussian(params.beta0, params.sigma_p)
                        : Marginal::skew_gaussian(params.beta0, params.sigma_p, params.lambda,
                                                  config_.tabulate_sg);
    out->e = (*problem_.e_builder)(params.theta_s, params.theta_r);
    out->cov_obs = std::make_unique<SreCovariance>(problem_.obs, out->e);
  } catch (const std::runtime_error&) {
    return false;  // factorization failure counts as out of support
  }
  out->sd_obs = out->cov_obs->diagonal_sd();

  const Index k = y_.size();
  out->u.resize(k);
  out->q.resize(k);
  out->sum_log_marginal = 0.0;
  const bool t_copula = problem_.model.copula == CopulaTag::TSre;
  for (Index i = 0; i < k; ++i) {
    out->sum_log_marginal += out->marginal.log_pdf(y_(i));
    double u = out->marginal.cdf(y_(i));
    if (u < kUniformClampEps || u > 1.0 - kUniformClampEps) {
      ++clamp_events_;
      u = std::min(std::max(u, kUniformClampEps), 1.0 - kUniformClampEps);
    }
    out->u(i) = u;
    out->q(i) = t_copula ? stats::student_t_quantile(u, params.nu) : stats::normal_quantile(u);
  }
  if (!std::isfinite(out->sum_log_marginal)) return false;
  return true;
}

double Sampler::copula_log_density_cached(double nu, const Vector& sd, const Vector& q,
                                          const SreCovariance& cov) const {
  const Index k = q.size();
  const Vector w = sd.cwiseProduct(q);
  const double log_sd_sum = sd.array().log().sum();
  if (problem_.model.copula == CopulaTag::GauSre) {
    double log_jac = -log_sd_sum;
    for (Index i = 0; i < k; ++i) log_jac += stats::normal_log_pdf(q(i));
    const double mvg = -0.5 * (static_cast<double>(k) * stats::kLogTwoPi + cov.log_det() +
                               cov.quadratic_form(w));
    return mvg - log_jac;
  }
  double log_jac = -log_sd_sum;
  for (Index i = 0; i < k; ++i) log_jac += stats::student_t_log_pdf(q(i), nu);
  const double kk = static_cast<double>(k);
  const double q_form = cov.quadratic_form(w);
  const double mvt = std::lgamma(0.5 * (nu + kk)) - std::lgamma(0.5 * nu) -
                     0.5 * kk * std::log(nu * M_PI) - 0.5 * cov.log_det() -
                     0.5 * (nu + kk) * std::log1p(q_form / nu);
  return mvt - log_jac;
}

double Sampler::log_target(const Vector& transformed) {
  const ProcessParams params = map_.from_transformed(transformed);
  const double prior = map_.log_prior(params, problem_.priors);
  if (!std::isfinite(prior)) return kNegInf;
  ThetaArtifacts art;
  if (!build_artifacts(params, &art)) return kNegInf;
  return art.sum_log_marginal +
         copula_log_density_cached(art.params.nu, art.sd_obs, art.q, *art.cov_obs) + prior +
         map_.log_jacobian(transformed);
}

void Sampler::update_latent_obs() {
  const Index k = y_.size();
  if (k == 0 || !problem_.model.measurement_error) return;
  ++adapt_round_;
  ++latent_proposed_rounds_;
  const bool lg = problem_.model.marginal == MarginalFamily::LogGaussian;
  const bool t_copula = problem_.model.copula == CopulaTag::TSre;
  const double nu = theta_.nu;
  const double gamma = gamma_;
  const DataModelFamily data_family = problem_.data.family;
  const double kappa1 = 1.0 / (kLatentTarget * (1.0 - kLatentTarget));
  const double rm_step = 1.0 / (20.0 + static_cast<double>(adapt_round_));

  parallel_for(k, config_.workers, [&](Index i) {
    Rng& rng = obs_rng_[static_cast<std::size_t>(i)];
    const double y = y_(i);
    const double q = q_(i);
    const double sd = sd_obs_(i);
    const double mu = problem_.obs->s.row(i).dot(eta_);
    const double step = latent_step_[static_cast<std::size_t>(i)];
    const double xi = rng.normal();

    double yp;
    double log_prop_corr = 0.0;
    if (lg) {
      yp = y * std::exp(step * xi);
      log_prop_corr = std::log(yp) - std::log(y);  // Jacobian of the log-scale walk
    } else {
      yp = y + step * xi;
    }

    double up = marginal_.cdf(yp);
    if (up < kUniformClampEps || up > 1.0 - kUniformClampEps) {
      ++clamp_events_;
      up = std::min(std::max(up, kUniformClampEps), 1.0 - kUniformClampEps);
    }
    const double qp = t_copula ? stats::student_t_quantile(up, nu) : stats::normal_quantile(up);

    const double r_new = sd * qp - mu;
    const double r_old = sd * q - mu;
    double log_alpha = marginal_.log_pdf(yp) - marginal_.log_pdf(y) + log_prop_corr;
    if (t_copula) {
      log_alpha += stats::student_t_log_pdf(q, nu) - stats::student_t_log_pdf(qp, nu) -
                   0.5 * gamma * (r_new * r_new - r_old * r_old);
    } else {
      log_alpha += stats::normal_log_pdf(q) - stats::normal_log_pdf(qp) -
                   0.5 * (r_new * r_new - r_old * r_old);
    }
    const double sigma_o = problem_.data.sigma(i);
    log_alpha += data_log_lik(problem_.z(i), yp, data_family, sigma_o) -
                 data_log_lik(problem_.z(i), y, data_family, sigma_o);

    const bool accept = std::isfinite(log_alpha) && std::log(rng.uniform()) < log_alpha;
    if (accept) {
      y_(i) = yp;
      u_(i) = up;
      q_(i) = qp;
      ++latent_accepted_[static_cast<std::size_t>(i)];
    }
    if (adapting_latent_) {
      latent_step_[static_cast<std::size_t>(i)] *=
          std::exp(kappa1 * ((accept ? 1.0 : 0.0) - kLatentTarget) * rm_step);
    }
  });
}

std::pair<double, double> Sampler::mix_scale_full_conditional() const {
  const double k = static_cast<double>(y_.size());
  const Vector v = sd_obs_.cwiseProduct(q_);
  const double q_form = cov_obs_->quadratic_form(v);
  return {0.5 * (k + theta_.nu), 0.5 * (theta_.nu + q_form)};
}

void Sampler::draw_mix_scale() {
  if (problem_.model.copula != CopulaTag::TSre) return;
  const auto [shape, rate] = mix_scale_full_conditional();
  gamma_ = main_rng_.gamma(shape, 1.0 / rate);
}

void Sampler::draw_coefficients() {
  const Vector w = sd_obs_.cwiseProduct(q_);
  const Vector rhs = problem_.obs->s.transpose() * w;
  const auto& llt = cov_obs_->capacitance_llt();
  const Vector mean = llt.solve(rhs);
  Vector z(eta_.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = main_rng_.normal();
  // (S'S + E^{-1}) = L L'; covariance (S'S + E^{-1})^{-1} needs L'^{-1} z
  const Vector noise = llt.matrixU().solve(z);
  eta_ = mean + noise / std::sqrt(gamma_);
}

bool Sampler::update_theta() {
  // the latent block moved y since the last call, so the current collapsed
  // value is recomputed from the cached (u, q, sd, cov) for this theta
  double sum_log_marginal = 0.0;
  for (Index i = 0; i < y_.size(); ++i) sum_log_marginal += marginal_.log_pdf(y_(i));
  const double cur_value = sum_log_marginal +
                           copula_log_density_cached(theta_.nu, sd_obs_, q_, *cov_obs_) +
                           map_.log_prior(theta_, problem_.priors) +
                           map_.log_jacobian(transformed_);

  const Vector proposal = theta_mh_.propose(transformed_, main_rng_);
  const ProcessParams prop_params = map_.from_transformed(proposal);
  const double prop_prior = map_.log_prior(prop_params, problem_.priors);
  double prop_value = kNegInf;
  ThetaArtifacts art;
  if (std::isfinite(prop_prior) && build_artifacts(prop_params, &art)) {
    prop_value = art.sum_log_marginal +
                 copula_log_density_cached(art.params.nu, art.sd_obs, art.q, *art.cov_obs) +
                 prop_prior + map_.log_jacobian(proposal);
  }

  const bool accept =
      std::isfinite(prop_value) && std::log(main_rng_.uniform()) < prop_value - cur_value;
  if (accept) {
    theta_ = art.params;
    transformed_ = proposal;
    marginal_ = art.marginal;
    cov_obs_ = std::move(art.cov_obs);
    sd_obs_ = std::move(art.sd_obs);
    u_ = std::move(art.u);
    q_ = std::move(art.q);
    e_ = std::move(art.e);
    miss_fresh_ = false;
  }
  theta_mh_.record(transformed_, accept);
  return accept;
}

void Sampler::refresh_missing_covariance() {
  if (miss_fresh_ || !problem_.miss || problem_.miss->s.rows() == 0) return;
  cov_miss_ = std::make_unique<SreCovariance>(problem_.miss, e_);
  sd_miss_ = cov_miss_->diagonal_sd();
  miss_fresh_ = true;
}

Vector Sampler::predict_missing() {
  const Index l = problem_.miss ? problem_.miss->s.rows() : 0;
  Vector ym(l);
  if (l == 0) return ym;
  refresh_missing_covariance();
  const bool t_copula = problem_.model.copula == CopulaTag::TSre;
  const double nu = theta_.nu;
  const double noise_sd = 1.0 / std::sqrt(gamma_);
  parallel_for(l, config_.workers, [&](Index i) {
    Rng& rng = miss_rng_[static_cast<std::size_t>(i)];
    const double mu = problem_.miss->s.row(i).dot(eta_);
    const double w = mu + noise_sd * rng.normal();
    const double x = w / sd_miss_(i);
    const double u =
        clamp_uniform(t_copula ? stats::student_t_cdf(x, nu) : stats::normal_cdf(x));
    ym(i) = marginal_.quantile(u);
  });
  return ym;
}

void Sampler::sweep() {
  update_latent_obs();
  draw_mix_scale();
  draw_coefficients();
  update_theta();
}

double Sampler::latent_acceptance_rate() const {
  if (latent_accepted_.empty() || latent_proposed_rounds_ == 0) return 0.0;
  double total = 0.0;
  for (long a : latent_accepted_) total += static_cast<double>(a);
  return total / (static_cast<double>(latent_accepted_.size()) *
                  static_cast<double>(latent_proposed_rounds_));
}

ChainOutput Sampler::run() {
  const auto t0 = std::chrono::steady_clock::now();
  ChainOutput out;
  out.param_names = map_.names();
  out.iterations = config_.iterations;
  out.burn_in = config_.burn_in;
  out.thin = config_.thin;

  const Index k = y_.size();
  const Index l = problem_.miss ? problem_.miss->s.rows() : 0;
  std::vector<Index> obs_ids = config_.store_obs;
  if (obs_ids.empty()) {
    obs_ids.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) obs_ids[static_cast<std::size_t>(i)] = i;
  }
  std::vector<Index> miss_ids = config_.store_miss;
  if (miss_ids.empty()) {
    miss_ids.resize(static_cast<std::size_t>(l));
    for (Index i = 0; i < l; ++i) miss_ids[static_cast<std::size_t>(i)] = i;
  }
  for (Index id : obs_ids) {
    if (id < 0 || id >= k) throw std::invalid_argument("run: store_obs index out of range");
  }
  for (Index id : miss_ids) {
    if (id < 0 || id >= l) throw std::invalid_argument("run: store_miss index out of range");
  }

  const long draws = config_.stored_draws();
  if (draws == 0) {
    out.warnings.push_back("no post-burn-in draws will be stored (iterations <= burn_in)");
  }
  const bool t_copula = problem_.model.copula == CopulaTag::TSre;
  out.theta.resize(draws, map_.dim());
  out.eta.resize(draws, eta_.size());
  if (t_copula) out.gamma.resize(draws);
  out.y_obs.resize(draws, static_cast<Index>(obs_ids.size()));
  const bool do_predict = config_.predict_missing && l > 0;
  out.y_miss.resize(draws, do_predict ? static_cast<Index>(miss_ids.size()) : 0);
  out.obs_ids = obs_ids;
  out.miss_ids = miss_ids;

  long stored = 0;
  for (long it = 0; it < config_.iterations; ++it) {
    sweep();
    if (it < config_.burn_in || (it - config_.burn_in) % config_.thin != 0) continue;
    const Vector theta_row = natural_parameters();
    if (!theta_row.allFinite() || !eta_.allFinite()) {
      throw std::runtime_error("run: non-finite draw at iteration " + std::to_string(it) +
                               " (theta=" + std::to_string(theta_row(0)) + ")");
    }
    out.theta.row(stored) = theta_row;
    out.eta.row(stored) = eta_;
    if (t_copula) out.gamma(stored) = gamma_;
    for (std::size_t c = 0; c < obs_ids.size(); ++c) {
      out.y_obs(stored, static_cast<Index>(c)) = y_(obs_ids[c]);
    }
    if (do_predict) {
      const Vector ym = predict_missing();
      if (!ym.allFinite()) {
        throw std::runtime_error("run: non-finite prediction at iteration " + std::to_string(it));
      }
      for (std::size_t c = 0; c < miss_ids.size(); ++c) {
        out.y_miss(stored, static_cast<Index>(c)) = ym(miss_ids[c]);
      }
    }
    ++stored;
  }

  out.theta_acceptance = theta_mh_.acceptance_rate();
  out.latent_acceptance = latent_acceptance_rate();
  out.theta_scale = theta_mh_.scale();
  out.clamp_events = clamp_events_.load();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Vector Sampler::natural_parameters() const {
  Vector row(map_.dim());
  Index i = 0;
  row(i++) = theta_.sigma_p;
  row(i++) = theta_.beta0;
  if (problem_.model.has_lambda()) row(i++) = theta_.lambda;
  for (Index r = 0; r < theta_.theta_s.size(); ++r) row(i++) = theta_.theta_s(r);
  row(i++) = theta_.theta_r;
  if (problem_.model.has_nu()) row(i++) = theta_.nu;
  return row;
}

Vector initial_latent(const Vector& z, const ModelSpec& model, double beta0) {
  if (model.marginal == MarginalFamily::SkewGaussian) return z;
  const double floor = 1e-6 * std::exp(beta0);
  return z.cwiseMax(floor);
}

ProcessParams initialize(const Vector& z, const std::vector<Point>& obs_coords,
                         const ModelSpec& model, const PriorSet& priors, Index resolutions,
                         Metric metric, double dist_scale, double domain_diameter,
                         std::vector<std::string>* warnings) {
  const Index k = z.size();
  if (k < 1) throw std::invalid_argument("initialize: empty data");
  const auto warn = [&](const std::string& msg) {
    if (warnings != nullptr) warnings->push_back(msg);
  };

  ProcessParams p;
  p.nu = 10.0;
  p.theta_s = Vector::Constant(resolutions, 1.0);

  Vector log_z(k);
  for (Index i = 0; i < k; ++i) {
    double v = z(i);
    if (v <= 0.0) {
      warn("initialize: non-positive data value replaced for log-moment estimates");
      v = 1e-12;
    }
    log_z(i) = std::log(v);
  }
  p.beta0 = log_z.mean();

  const bool lg = model.marginal == MarginalFamily::LogGaussian;
  const Vector& moment_data = lg ? log_z : z;
  double sd = 0.0;
  if (k > 1) {
    const double mean = moment_data.mean();
    sd = std::sqrt((moment_data.array() - mean).square().sum() / static_cast<double>(k - 1));
  }
  if (!(sd > 0.0)) {
    sd = priors.at("sigma_p").median();
    warn("initialize: degenerate sample sd, using the prior median for sigma_p");
  }
  p.sigma_p = sd;

  if (model.has_lambda()) {
    const double mean = z.mean();
    const double m2 = (z.array() - mean).square().mean();
    const double m3 = (z.array() - mean).cube().mean();
    double skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    // method-of-moments inversion; |skewness| of the SG family is < 0.9953
    const double max_skew = 0.99;
    skew = std::min(std::max(skew, -max_skew), max_skew);
    if (skew == 0.0) {
      p.lambda = 0.0;
    } else {
      const double a23 = std::pow(std::fabs(skew), 2.0 / 3.0);
      const double b23 = std::pow(0.5 * (4.0 - M_PI), 2.0 / 3.0);
      double zeta = std::sqrt(0.5 * M_PI * a23 / (a23 + b23));
      zeta = std::min(zeta, 0.995);
      if (skew < 0.0) zeta = -zeta;
      p.lambda = zeta / std::sqrt(1.0 - zeta * zeta);
    }
  }

  if (k < 30) {
    p.theta_s.setConstant(priors.at("theta_s").median());
    p.theta_r = priors.at("theta_r").median();
    warn("initialize: K < 30, semivariogram skipped, using prior medians for theta_s/theta_r");
    return p;
  }

  const Vector detrended = detrend_linear(obs_coords, moment_data);
  double max_dist = 0.0;
  for (const Point& a : obs_coords) {
    max_dist = std::max(max_dist, distance(obs_coords.front(), a, metric) / dist_scale);
  }
  const double cutoff = std::max(max_dist, domain_diameter) / 3.0;
  const EmpiricalVariogram emp =
      cressie_hawkins_variogram(obs_coords, detrended, metric, dist_scale, 15, cutoff);

  VariogramFit fit;
  for (const char* name : {"spherical", "exponential", "wave"}) {
    fit = fit_variogram(emp, name);
    if (fit.ok) break;
  }
  if (!fit.ok) {
    p.theta_s.setConstant(1.0);
    p.theta_r = 0.5 * domain_diameter;
    warn("initialize: all semivariogram fits failed, using theta_s=1 and half the diameter");
    return p;
  }
  p.theta_r = fit.range;
  p.theta_s.setConstant(fit.nugget > 0.0 ? fit.partial_sill / fit.nugget : 1.0);
  return p;
}

}  // namespace srecop
