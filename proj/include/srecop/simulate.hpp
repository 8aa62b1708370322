#pragma once

#include <cstdint>
#include <string>

#include "srecop/geometry.hpp"
#include "srecop/lowrank.hpp"
#include "srecop/mcmc.hpp"
#include "srecop/types.hpp"

namespace srecop {

/// One simulation scenario: the data-generating model, its true parameters,
/// the measurement-error rule, and the replicate plan. Replicate r draws on
/// stream (seed, r), so a study can be partially re-run.
struct ScenarioSpec {
  ModelSpec model;
  ProcessParams truth;
  double sigma_o = 0.0;        // fixed value, or derived from the rule below
  double sigma_o_rule = -1.0;  // if >= 0: sigma_o^2 = rule * sigma_p^2
  int replicates = 100;
  std::uint64_t seed = 0;

  double sigma_o_value() const;
};

struct SimulatedReplicate {
  Vector y;    // full latent vector, length N
  Vector z;    // observed data, length K
  double gamma = 1.0;
  Vector eta;  // basis coefficients (eta-bar for t models)
};

/// Ancestral draw in the model's own order: (gamma ->) eta -> per-BAU
/// conditional noise pushed through the inverse anamorphosis -> data model on
/// the observed BAUs. No N x N sampling occurs.
SimulatedReplicate simulate_replicate(const ScenarioSpec& spec, const SreCovariance& full_cov,
                                      const Matrix& e, const MissingnessPartition& part, int r,
                                      int workers = 1);

}  // namespace srecop
