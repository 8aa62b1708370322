#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <regex>

#include "srecop/diagnostics.hpp"
#include "srecop/io.hpp"
#include "srecop/pipeline.hpp"

namespace {

using namespace srecop;

struct CommonOptions {
  std::string config_path;
  long seed = -1;
  int workers = -1;
  double alpha = 0.10;
  int chains = 1;
  std::string store_bau;
};

RunConfig load_config(const CommonOptions& opts) {
  RunConfig config = RunConfig::load(opts.config_path);
  if (opts.seed >= 0) {
    config.set("mcmc", "seed", std::to_string(opts.seed));
    config.set("simulate", "seed", std::to_string(opts.seed));
  }
  if (opts.workers >= 1) config.set("mcmc", "workers", std::to_string(opts.workers));
  if (!opts.store_bau.empty()) config.set("mcmc", "store_bau", opts.store_bau);
  return config;
}

int cmd_simulate(const CommonOptions& opts) {
  const RunConfig config = load_config(opts);
  const BAUGrid grid = grid_from_config(config);
  const BasisSet basis = basis_from_config(config, grid);
  const MissingnessPartition part = partition_missing(grid, pattern_from_config(config, grid));
  const ScenarioSpec spec = scenario_from_config(config);

  const Matrix s = evaluate_basis(grid, basis);
  const EBuilder build_e(basis, kernel_from_config(config));
  if (spec.truth.theta_s.size() != build_e.resolutions()) {
    throw std::runtime_error("simulate: theta_s entries must match basis resolutions");
  }
  const Matrix e = build_e(spec.truth.theta_s, spec.truth.theta_r);
  const SreCovariance cov(s, e);

  const std::string out_dir = config.require("output", "dir");
  const int workers = static_cast<int>(config.get_long("mcmc", "workers", 1));
  run_study(spec, grid, part, cov, e, out_dir, workers);
  write_partition(out_dir + "/partition.csv", part, grid.size());
  std::cout << "simulate: wrote " << spec.replicates << " replicates to " << out_dir << "\n";
  return 0;
}

std::vector<Index> parse_store_bau(const std::string& text, const std::vector<Index>& pool) {
  // comma-separated BAU ids filtered into subset indices of `pool`
  std::vector<Index> subset;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field.empty()) continue;
    const Index bau = std::stol(field);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i] == bau) {
        subset.push_back(static_cast<Index>(i));
        break;
      }
    }
  }
  return subset;
}

int cmd_fit(const CommonOptions& opts) {
  const RunConfig config = load_config(opts);
  const BAUGrid grid = grid_from_config(config);
  const BasisSet basis = basis_from_config(config, grid);
  const BAUDataset dataset = load_dataset(config.require("data", "path"), grid);
  if (dataset.observed_ids.empty()) throw std::runtime_error("fit: the dataset is empty");

  FitSetup setup = make_fit_setup(config, grid, basis, dataset);
  FitConfig fit = fit_config_from_config(config);
  if (config.has("mcmc", "store_bau")) {
    fit.store_obs = parse_store_bau(config.require("mcmc", "store_bau"), setup.part.observed);
    fit.store_miss = parse_store_bau(config.require("mcmc", "store_bau"), setup.part.missing);
  }

  const std::string out_dir = config.require("output", "dir");
  std::filesystem::create_directories(out_dir);
  write_partition(out_dir + "/partition.csv", setup.part, grid.size());

  for (int chain = 1; chain <= opts.chains; ++chain) {
    FitConfig chain_fit = fit;
    chain_fit.seed = fit.seed + static_cast<std::uint64_t>(chain - 1);
    Sampler sampler(setup.problem, setup.initial, chain_fit);
    ChainOutput output = sampler.run();
    for (const auto& w : setup.warnings) output.warnings.push_back(w);
    const std::string dir =
        opts.chains == 1 ? out_dir : out_dir + "/chain_" + std::to_string(chain);
    write_chain_output(dir, output, setup.part);
    std::cout << "fit: chain " << chain << "/" << opts.chains << " stored "
              << output.theta.rows() << " draws (theta acceptance "
              << output.theta_acceptance << ", " << output.seconds << " s)\n";
    for (const auto& w : output.warnings) std::cout << "fit: warning: " << w << "\n";
  }
  return 0;
}

int cmd_predict(const CommonOptions& opts, const std::string& run_dir) {
  const DrawTable y_obs = load_draw_table(run_dir + "/y_obs.csv");
  DrawTable y_miss;
  if (std::filesystem::exists(run_dir + "/y_miss.csv")) {
    y_miss = load_draw_table(run_dir + "/y_miss.csv");
  }
  const auto rows = prediction_rows(y_obs, y_miss, opts.alpha);
  write_predictions(run_dir + "/predictions.csv", rows);
  std::cout << "predict: wrote " << rows.size() << " rows to " << run_dir
            << "/predictions.csv (alpha " << opts.alpha << ")\n";
  return 0;
}

int cmd_diagnose_run(const std::string& run_dir) {
  std::vector<std::string> chain_dirs;
  for (int chain = 1;; ++chain) {
    const std::string dir = run_dir + "/chain_" + std::to_string(chain);
    if (!std::filesystem::exists(dir + "/params.csv")) break;
    chain_dirs.push_back(dir);
  }
  if (chain_dirs.empty()) chain_dirs.push_back(run_dir);

  const DrawTable first = load_draw_table(chain_dirs.front() + "/params.csv");
  std::vector<PosteriorSummary> summaries;
  std::vector<double> r_hat;
  for (std::size_t c = 0; c < first.columns.size(); ++c) {
    Vector pooled = first.values.col(static_cast<Index>(c));
    summaries.push_back(summarize(first.columns[c], pooled));
  }
  if (chain_dirs.size() >= 2) {
    const Index n = first.values.rows();
    Matrix chains(static_cast<Index>(chain_dirs.size()), n);
    for (std::size_t c = 0; c < first.columns.size(); ++c) {
      for (std::size_t m = 0; m < chain_dirs.size(); ++m) {
        const DrawTable table = load_draw_table(chain_dirs[m] + "/params.csv");
        if (table.values.rows() != n) {
          throw std::runtime_error("diagnose: chains have different lengths");
        }
        chains.row(static_cast<Index>(m)) = table.values.col(static_cast<Index>(c));
      }
      r_hat.push_back(gelman_rubin(chains).r_hat);
    }
  }
  write_summaries(run_dir + "/summary.csv", summaries, r_hat);
  std::cout << "diagnose: wrote " << run_dir << "/summary.csv\n";
  return 0;
}

int cmd_diagnose_study(const std::string& runs_dir, const std::string& truth_dir) {
  // replicate r: <runs_dir>/r<r>/predictions.csv against <truth_dir>/truth_r<r>.csv
  std::vector<int> replicates;
  const std::regex rep_dir("r(\\d+)");
  for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && std::regex_match(name, match, rep_dir) &&
        std::filesystem::exists(entry.path() / "predictions.csv")) {
      replicates.push_back(std::stoi(match[1]));
    }
  }
  std::sort(replicates.begin(), replicates.end());
  if (replicates.empty()) {
    throw std::runtime_error("diagnose: no r<k>/predictions.csv under " + runs_dir);
  }

  const auto first =
      load_predictions(runs_dir + "/r" + std::to_string(replicates.front()) + "/predictions.csv");
  const Index n_rows = static_cast<Index>(first.size());
  const Index r_count = static_cast<Index>(replicates.size());
  Matrix preds(r_count, n_rows), lo(r_count, n_rows), hi(r_count, n_rows), truths(r_count, n_rows);
  Index max_bau = 0;
  for (const auto& row : first) max_bau = std::max(max_bau, row.bau_id);
  for (Index r = 0; r < r_count; ++r) {
    const std::string tag = std::to_string(replicates[static_cast<std::size_t>(r)]);
    const auto rows = load_predictions(runs_dir + "/r" + tag + "/predictions.csv");
    if (static_cast<Index>(rows.size()) != n_rows) {
      throw std::runtime_error("diagnose: replicate " + tag + " has a different BAU set");
    }
    const Vector truth = load_truth(truth_dir + "/truth_r" + tag + ".csv", max_bau + 1);
    for (Index j = 0; j < n_rows; ++j) {
      const auto& row = rows[static_cast<std::size_t>(j)];
      preds(r, j) = row.mean;
      lo(r, j) = row.lo;
      hi(r, j) = row.hi;
      truths(r, j) = truth(row.bau_id);
    }
  }

  const Vector rmspe_by_bau = rmspe(preds, truths);
  const Vector ec_by_bau = empirical_coverage(lo, hi, truths);
  std::vector<MetricsRow> rows;
  for (Index j = 0; j < n_rows; ++j) {
    MetricsRow row;
    row.bau_id = first[static_cast<std::size_t>(j)].bau_id;
    row.observed = first[static_cast<std::size_t>(j)].observed;
    row.rmspe = rmspe_by_bau(j);
    row.ec = ec_by_bau(j);
    rows.push_back(row);
  }
  write_metrics(runs_dir + "/metrics.csv", rows);
  std::cout << "diagnose: wrote " << runs_dir << "/metrics.csv over " << r_count
            << " replicates\n";
  return 0;
}

int cmd_aggregate(const CommonOptions& opts) {
  const RunConfig config = load_config(opts);
  const BAUGrid grid = grid_from_config(config);
  const auto records = load_retrievals(config.require("data", "retrievals"));
  const BAUDataset dataset = aggregate_retrievals(records, grid);
  const std::string out_dir = config.require("output", "dir");
  std::filesystem::create_directories(out_dir);
  write_dataset(out_dir + "/data.csv", dataset);
  long total = 0;
  for (long c : dataset.counts) total += c;
  std::cout << "aggregate: " << records.size() << " retrievals -> "
            << dataset.observed_ids.size() << " observed BAUs (" << dataset.dropped
            << " out of bounds, " << total << " assigned)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-based spatial random effects models: simulate, fit, predict"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* config_opt = cmd->add_option("--config", opts.config_path, "run-config file");
    if (needs_config) config_opt->required();
    cmd->add_option("--seed", opts.seed, "override mcmc/simulate seed");
    cmd->add_option("--workers", opts.workers, "override worker count");
  };

  auto* simulate = app.add_subcommand("simulate", "generate replicate datasets");
  add_common(simulate, true);

  auto* fit = app.add_subcommand("fit", "run the MCMC sampler on a dataset");
  add_common(fit, true);
  fit->add_option("--chains", opts.chains, "independent chains (seeds seed, seed+1, ...)");
  fit->add_option("--store-bau", opts.store_bau, "comma-separated BAU ids to store");

  std::string run_dir, study_dir, truth_dir;
  auto* predict = app.add_subcommand("predict", "posterior prediction CSV from stored draws");
  predict->add_option("--run", run_dir, "fit output directory")->required();
  predict->add_option("--alpha", opts.alpha, "interval level (default 0.10)");

  auto* diagnose = app.add_subcommand("diagnose", "posterior summaries / study metrics");
  diagnose->add_option("--run", run_dir, "fit output directory (summaries + R-hat)");
  diagnose->add_option("--study", study_dir, "directory of per-replicate runs r<k>/");
  diagnose->add_option("--truth", truth_dir, "directory with truth_r<k>.csv files");
  diagnose->add_option("--alpha", opts.alpha, "interval level (default 0.10)");

  auto* aggregate = app.add_subcommand("aggregate", "grid point retrievals into BAU data");
  add_common(aggregate, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (fit->parsed()) return cmd_fit(opts);
    if (predict->parsed()) return cmd_predict(opts, run_dir);
    if (diagnose->parsed()) {
      if (!study_dir.empty()) {
        if (truth_dir.empty()) throw std::runtime_error("diagnose --study needs --truth");
        return cmd_diagnose_study(study_dir, truth_dir);
      }
      if (run_dir.empty()) throw std::runtime_error("diagnose needs --run or --study");
      return cmd_diagnose_run(run_dir);
    }
    if (aggregate->parsed()) return cmd_aggregate(opts);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
