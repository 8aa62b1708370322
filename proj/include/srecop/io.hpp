#pragma once

#include <string>
#include <vector>

#include "srecop/diagnostics.hpp"
#include "srecop/geometry.hpp"
#include "srecop/mcmc.hpp"
#include "srecop/simulate.hpp"
#include "srecop/types.hpp"

namespace srecop {

/// Point retrieval with an instrument-supplied measurement-error sd.
struct RetrievalRecord {
  double lon = 0.0;
  double lat = 0.0;
  double z = 0.0;
  double sigma = 0.0;  // per-retrieval measurement-error sd, > 0
};

/// BAU-level dataset: one row per observed BAU; missing BAUs are the
/// complement of observed_ids in the grid.
struct BAUDataset {
  std::vector<Index> observed_ids;  // sorted, unique
  Vector z;
  Vector sigma_o;
  std::vector<long> counts;  // retrievals per observed BAU (aggregation only)
  Index dropped = 0;         // out-of-bounds retrievals (aggregation only)
};

/// Averages point retrievals into their containing BAUs: z is the mean of
/// the values and sigma_o = sqrt(sum sigma_i^2) / n_k. BAUs with no
/// retrievals become missing; out-of-bounds records are dropped and counted.
BAUDataset aggregate_retrievals(const std::vector<RetrievalRecord>& records, const BAUGrid& grid);

std::vector<RetrievalRecord> load_retrievals(const std::string& path);
BAUDataset load_dataset(const std::string& path, const BAUGrid& grid);
void write_dataset(const std::string& path, const BAUDataset& dataset);

MissingnessPartition partition_from_dataset(const BAUDataset& dataset, const BAUGrid& grid);

void write_partition(const std::string& path, const MissingnessPartition& part, Index n);
/// Reads a `bau_id,observed` CSV into a missingness mask over N BAUs.
MaskPattern load_partition_mask(const std::string& path, Index n);
/// Reads a `cell,included` CSV over the raw nx*ny lattice.
std::vector<bool> load_grid_mask(const std::string& path, Index cells);

/// Writes truth_r<k>.csv (bau_id,y) and data_r<k>.csv (bau_id,z,sigma_o) for
/// every replicate; byte-identical across re-runs with the same spec.
void run_study(const ScenarioSpec& spec, const BAUGrid& grid, const MissingnessPartition& part,
               const SreCovariance& full_cov, const Matrix& e, const std::string& out_dir,
               int workers = 1);

Vector load_truth(const std::string& path, Index n);

/// params.csv / eta.csv / y_obs.csv / y_miss.csv layout: an iteration column
/// followed by one column per quantity.
struct DrawTable {
  std::vector<std::string> columns;  // excluding the iteration column
  std::vector<long> iterations;
  Matrix values;  // draws x columns
};

DrawTable load_draw_table(const std::string& path);

void write_chain_output(const std::string& dir, const ChainOutput& output,
                        const MissingnessPartition& part);

struct PredictionRow {
  Index bau_id = 0;
  bool observed = false;
  double mean = 0.0;
  double psd = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

void write_predictions(const std::string& path, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> load_predictions(const std::string& path);

void write_summaries(const std::string& path, const std::vector<PosteriorSummary>& summaries,
                     const std::vector<double>& r_hat = {});

struct MetricsRow {
  Index bau_id = 0;
  bool observed = false;
  double rmspe = 0.0;
  double ec = 0.0;
};

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows);

/// Flat key/value text summary (acceptance rates, scales, timings).
void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries);

std::string format_double(double v);  // 17 significant digits

}  // namespace srecop
