#pragma once

#include <memory>
#include <string>

#include "srecop/basis.hpp"
#include "srecop/config.hpp"
#include "srecop/geometry.hpp"
#include "srecop/io.hpp"
#include "srecop/mcmc.hpp"
#include "srecop/simulate.hpp"

namespace srecop {

BAUGrid grid_from_config(const RunConfig& config);
BasisSet basis_from_config(const RunConfig& config, const BAUGrid& grid);
Kernel kernel_from_config(const RunConfig& config);
MissingnessPattern pattern_from_config(const RunConfig& config, const BAUGrid& grid);
PriorSet priors_from_config(const RunConfig& config, const ModelSpec& model);
ScenarioSpec scenario_from_config(const RunConfig& config);
FitConfig fit_config_from_config(const RunConfig& config);

/// Everything a fit needs, assembled once per dataset.
struct FitSetup {
  ModelSpec model;
  MissingnessPartition part;
  FitProblem problem;
  ProcessParams initial;
  std::vector<std::string> warnings;
};

FitSetup make_fit_setup(const RunConfig& config, const BAUGrid& grid, const BasisSet& basis,
                        const BAUDataset& dataset);

/// Posterior prediction rows (mean, PSD, central interval at level alpha)
/// from stored y draws; observed BAUs come first in partition order.
std::vector<PredictionRow> prediction_rows(const DrawTable& y_obs, const DrawTable& y_miss,
                                           double alpha);

}  // namespace srecop
