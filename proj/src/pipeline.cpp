#include "srecop/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "srecop/diagnostics.hpp"

namespace srecop {

BAUGrid grid_from_config(const RunConfig& config) {
  Bounds bounds;
  bounds.x_min = config.get_double("grid", "x_min", 0.0);
  bounds.x_max = config.get_double("grid", "x_max", 1.0);
  bounds.y_min = config.get_double("grid", "y_min", 0.0);
  bounds.y_max = config.get_double("grid", "y_max", 1.0);
  const int nx = static_cast<int>(config.get_long("grid", "nx", 1));
  const int ny = static_cast<int>(config.get_long("grid", "ny", 1));
  const std::string metric_name = config.get("grid", "metric", "euclidean");
  Metric metric;
  if (metric_name == "euclidean") {
    metric = Metric::Euclidean;
  } else if (metric_name == "great_circle") {
    metric = Metric::GreatCircle;
  } else {
    throw std::runtime_error("config: unknown metric " + metric_name);
  }
  const double dist_scale = config.get_double("grid", "dist_scale", 1.0);
  if (config.has("grid", "mask_file")) {
    const auto include = load_grid_mask(config.require("grid", "mask_file"),
                                        static_cast<Index>(nx) * static_cast<Index>(ny));
    return build_grid(bounds, nx, ny, include, metric, dist_scale);
  }
  return build_grid(bounds, nx, ny, nullptr, metric, dist_scale);
}

BasisSet basis_from_config(const RunConfig& config, const BAUGrid& grid) {
  if (config.has("basis", "centers_file")) {
    // explicit centers CSV: center_id,x,y,aperture; one resolution per
    // distinct aperture in file order
    const std::string path = config.require("basis", "centers_file");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "center_id,x,y,aperture") {
      throw std::runtime_error(path + ": expected header 'center_id,x,y,aperture'");
    }
    BasisSet basis;
    basis.metric = grid.metric();
    basis.dist_scale = grid.dist_scale();
    basis.aperture_rule = "explicit";
    long line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string field;
      double values[4] = {0, 0, 0, 0};
      for (double& v : values) {
        if (!std::getline(row, field, ',')) {
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 4 fields");
        }
        v = std::stod(field);
      }
      if (basis.resolutions.empty() || basis.resolutions.back().aperture != values[3]) {
        basis.resolutions.push_back({{}, values[3]});
      }
      basis.resolutions.back().centers.push_back({values[1], values[2]});
    }
    if (basis.size() == 0) throw std::runtime_error(path + ": no basis centers");
    return basis;
  }

  const auto counts_raw = config.get_doubles("basis", "counts");
  if (counts_raw.empty()) throw std::runtime_error("config: [basis] counts is required");
  std::vector<int> counts;
  for (double c : counts_raw) counts.push_back(static_cast<int>(c));
  std::vector<double> apertures;
  if (config.get("basis", "apertures", "auto") == "auto") {
    apertures.assign(counts.size(), -1.0);
  } else {
    apertures = config.get_doubles("basis", "apertures");
    if (apertures.size() == 1 && counts.size() > 1) {
      apertures.assign(counts.size(), apertures.front());
    }
  }
  return regular_basis(grid.bounds(), counts, apertures, grid.metric(), grid.dist_scale());
}

Kernel kernel_from_config(const RunConfig& config) {
  return kernel_from_string(config.get("basis", "kernel", "exponential"));
}

MissingnessPattern pattern_from_config(const RunConfig& config, const BAUGrid& grid) {
  const std::string pattern = config.get("missing", "pattern", "none");
  const auto seed = static_cast<std::uint64_t>(config.get_long("missing", "seed", 0));
  if (pattern == "none") return MarPattern{0.0, seed};
  if (pattern == "mar") {
    return MarPattern{config.require_double("missing", "prob"), seed};
  }
  if (pattern == "mar_exact") {
    return MarExactPattern{config.get_long("missing", "observed_count", 0), seed};
  }
  if (pattern == "mbd") {
    MbdPattern mbd;
    std::istringstream in(config.require("missing", "blocks"));
    std::string block_text;
    while (std::getline(in, block_text, ';')) {
      std::istringstream block(block_text);
      Bounds b;
      if (!(block >> b.x_min >> b.y_min >> b.x_max >> b.y_max)) {
        throw std::runtime_error("config: [missing] blocks must be 'x0 y0 x1 y1 ; ...'");
      }
      mbd.blocks.push_back(b);
    }
    if (mbd.blocks.empty()) throw std::runtime_error("config: [missing] blocks is empty");
    return mbd;
  }
  if (pattern == "mask") {
    return load_partition_mask(config.require("missing", "mask_file"), grid.size());
  }
  throw std::runtime_error("config: unknown missingness pattern " + pattern);
}

PriorSet priors_from_config(const RunConfig& config, const ModelSpec& model) {
  PriorSet priors = model.marginal == MarginalFamily::SkewGaussian ? PriorSet::defaults_sg()
                                                                   : PriorSet::defaults_lg();
  for (const char* name : {"sigma_p", "beta0", "lambda", "theta_s", "theta_r", "nu"}) {
    if (config.has("priors", name)) {
      priors.set(name, Prior::parse(config.require("priors", name)));
    }
  }
  return priors;
}

ScenarioSpec scenario_from_config(const RunConfig& config) {
  ScenarioSpec spec;
  spec.model = ModelSpec::from_string(config.get("simulate", "model", "lg-gau"));
  spec.truth.beta0 = config.get_double("simulate", "beta0", std::log(1000.0));
  spec.truth.sigma_p = config.get_double("simulate", "sigma_p", 0.1);
  spec.truth.lambda = config.get_double("simulate", "lambda", -5.0);
  const double theta_s = config.get_double("simulate", "theta_s", 10.0);
  spec.truth.theta_r = config.get_double("simulate", "theta_r", std::sqrt(2.0) / 4.0);
  spec.truth.nu = config.get_double("simulate", "nu", 4.0);
  spec.truth.theta_s = Vector::Constant(1, theta_s);
  spec.sigma_o = config.get_double("simulate", "sigma_o", 0.0);
  spec.sigma_o_rule = config.get_double("simulate", "sigma_o_rule", spec.sigma_o > 0 ? -1.0 : 0.05);
  spec.replicates = static_cast<int>(config.get_long("simulate", "replicates", 100));
  spec.seed = static_cast<std::uint64_t>(config.get_long("simulate", "seed", 0));
  return spec;
}

FitConfig fit_config_from_config(const RunConfig& config) {
  FitConfig fit;
  fit.iterations = config.get_long("mcmc", "iterations", 45000);
  fit.burn_in = config.get_long("mcmc", "burn_in", 5000);
  fit.thin = config.get_long("mcmc", "thin", 4);
  fit.seed = static_cast<std::uint64_t>(config.get_long("mcmc", "seed", 1));
  fit.workers = static_cast<int>(config.get_long("mcmc", "workers", 1));
  fit.adapt = config.get_bool("mcmc", "adapt", true);
  fit.tabulate_sg = config.get_bool("mcmc", "tabulate_sg", true);
  fit.predict_missing = config.get_bool("mcmc", "predict_missing", true);
  if (fit.iterations < 0 || fit.burn_in < 0 || fit.thin < 1) {
    throw std::runtime_error("config: invalid mcmc iteration plan");
  }
  return fit;
}

FitSetup make_fit_setup(const RunConfig& config, const BAUGrid& grid, const BasisSet& basis,
                        const BAUDataset& dataset) {
  FitSetup setup;
  setup.model = ModelSpec::from_string(config.require("model", "family"));
  setup.part = partition_from_dataset(dataset, grid);

  const Matrix s = evaluate_basis(grid, basis);
  const Index k = static_cast<Index>(setup.part.observed.size());
  const Index l = static_cast<Index>(setup.part.missing.size());
  Matrix s_obs(k, s.cols());
  for (Index i = 0; i < k; ++i) s_obs.row(i) = s.row(setup.part.observed[static_cast<std::size_t>(i)]);
  Matrix s_miss(l, s.cols());
  for (Index i = 0; i < l; ++i) s_miss.row(i) = s.row(setup.part.missing[static_cast<std::size_t>(i)]);

  setup.problem.model = setup.model;
  setup.problem.obs = std::make_shared<SreStructure>(std::move(s_obs));
  setup.problem.miss = std::make_shared<SreStructure>(std::move(s_miss));
  setup.problem.e_builder = std::make_shared<EBuilder>(basis, kernel_from_config(config));
  setup.problem.z = dataset.z;
  setup.problem.data.family = setup.model.data_model();
  setup.problem.data.sigma_o = dataset.sigma_o;
  setup.problem.priors = priors_from_config(config, setup.model);

  std::vector<Point> obs_coords;
  obs_coords.reserve(static_cast<std::size_t>(k));
  for (Index id : setup.part.observed) obs_coords.push_back(grid.centroid(id));
  setup.initial = initialize(dataset.z, obs_coords, setup.model, setup.problem.priors,
                             static_cast<Index>(basis.resolutions.size()), grid.metric(),
                             grid.dist_scale(),
                             grid.bounds().diameter(grid.metric(), grid.dist_scale()),
                             &setup.warnings);
  return setup;
}

std::vector<PredictionRow> prediction_rows(const DrawTable& y_obs, const DrawTable& y_miss,
                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("prediction_rows: bad alpha");
  std::vector<PredictionRow> rows;
  const auto summarize_column = [&](const Matrix& draws, Index col, Index bau_id, bool observed) {
    const Vector column = draws.col(col);
    PredictionRow row;
    row.bau_id = bau_id;
    row.observed = observed;
    row.mean = column.mean();
    row.psd = column.size() > 1 ? std::sqrt((column.array() - row.mean).square().sum() /
                                            static_cast<double>(column.size() - 1))
                                : 0.0;
    row.lo = quantile(column, 0.5 * alpha);
    row.hi = quantile(column, 1.0 - 0.5 * alpha);
    rows.push_back(row);
  };
  const auto ids_from_columns = [](const DrawTable& table) {
    std::vector<Index> ids;
    for (const std::string& name : table.columns) {
      if (name.rfind("bau_", 0) != 0) {
        throw std::runtime_error("prediction_rows: unexpected column " + name);
      }
      ids.push_back(std::stol(name.substr(4)));
    }
    return ids;
  };
  const auto obs_ids = ids_from_columns(y_obs);
  for (std::size_t c = 0; c < obs_ids.size(); ++c) {
    summarize_column(y_obs.values, static_cast<Index>(c), obs_ids[c], true);
  }
  if (y_miss.values.cols() > 0) {
    const auto miss_ids = ids_from_columns(y_miss);
    for (std::size_t c = 0; c < miss_ids.size(); ++c) {
      summarize_column(y_miss.values, static_cast<Index>(c), miss_ids[c], false);
    }
  }
  return rows;
}

}  // namespace srecop
