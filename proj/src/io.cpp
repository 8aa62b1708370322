#include "srecop/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "srecop/parallel.hpp"

namespace srecop {

namespace {

/// Writes to <path>.tmp and renames on success, so error paths leave no
/// partial output files behind.
class AtomicFile {
 public:
  explicit AtomicFile(const std::string& path) : path_(path), tmp_(path + ".tmp"), out_(tmp_) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + tmp_);
  }
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + tmp_);
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& path, long line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + text +
                             "'");
  }
}

long parse_long(const std::string& text, const std::string& path, long line_no) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad integer '" + text +
                             "'");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

void expect_header(const std::string& got, const std::string& want, const std::string& path) {
  if (got != want) {
    throw std::runtime_error(path + ": expected header '" + want + "', got '" + got + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

BAUDataset aggregate_retrievals(const std::vector<RetrievalRecord>& records, const BAUGrid& grid) {
  if (records.empty()) throw std::runtime_error("aggregate_retrievals: no records");
  std::map<Index, std::pair<double, double>> sums;  // bau -> (sum z, sum sigma^2)
  std::map<Index, long> counts;
  Index dropped = 0;
  for (const RetrievalRecord& rec : records) {
    if (!(rec.sigma > 0.0)) {
      throw std::runtime_error("aggregate_retrievals: sigma_trop must be > 0");
    }
    const Index bau = grid.locate({rec.lon, rec.lat});
    if (bau < 0) {
      ++dropped;
      continue;
    }
    sums[bau].first += rec.z;
    sums[bau].second += rec.sigma * rec.sigma;
    ++counts[bau];
  }
  if (sums.empty()) throw std::runtime_error("aggregate_retrievals: every record out of bounds");
  BAUDataset dataset;
  dataset.dropped = dropped;
  dataset.z.resize(static_cast<Index>(sums.size()));
  dataset.sigma_o.resize(static_cast<Index>(sums.size()));
  Index row = 0;
  for (const auto& [bau, sz] : sums) {
    const double n_k = static_cast<double>(counts[bau]);
    dataset.observed_ids.push_back(bau);
    dataset.z(row) = sz.first / n_k;
    dataset.sigma_o(row) = std::sqrt(sz.second) / n_k;
    dataset.counts.push_back(counts[bau]);
    ++row;
  }
  return dataset;
}

std::vector<RetrievalRecord> load_retrievals(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "lon,lat,z,sigma_trop", path);
  std::vector<RetrievalRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 4 fields");
    }
    records.push_back({parse_double(fields[0], path, line_no),
                       parse_double(fields[1], path, line_no),
                       parse_double(fields[2], path, line_no),
                       parse_double(fields[3], path, line_no)});
  }
  return records;
}

BAUDataset load_dataset(const std::string& path, const BAUGrid& grid) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "bau_id,z,sigma_o", path);
  std::map<Index, std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    const long bau = parse_long(fields[0], path, line_no);
    if (bau < 0 || bau >= grid.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bau_id out of range");
    }
    const double z = parse_double(fields[1], path, line_no);
    const double sigma = parse_double(fields[2], path, line_no);
    if (!(sigma > 0.0)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": sigma_o must be > 0");
    }
    if (!rows.emplace(bau, std::make_pair(z, sigma)).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate bau_id " +
                               std::to_string(bau));
    }
  }
  BAUDataset dataset;
  dataset.z.resize(static_cast<Index>(rows.size()));
  dataset.sigma_o.resize(static_cast<Index>(rows.size()));
  Index row = 0;
  for (const auto& [bau, zs] : rows) {
    dataset.observed_ids.push_back(bau);
    dataset.z(row) = zs.first;
    dataset.sigma_o(row) = zs.second;
    ++row;
  }
  return dataset;
}

void write_dataset(const std::string& path, const BAUDataset& dataset) {
  AtomicFile file(path);
  file.stream() << "bau_id,z,sigma_o\n";
  for (std::size_t i = 0; i < dataset.observed_ids.size(); ++i) {
    file.stream() << dataset.observed_ids[i] << ',' << format_double(dataset.z(static_cast<Index>(i)))
                  << ',' << format_double(dataset.sigma_o(static_cast<Index>(i))) << '\n';
  }
  file.commit();
}

MissingnessPartition partition_from_dataset(const BAUDataset& dataset, const BAUGrid& grid) {
  std::vector<bool> observed(static_cast<std::size_t>(grid.size()), false);
  for (Index bau : dataset.observed_ids) observed[static_cast<std::size_t>(bau)] = true;
  return partition_missing(grid, MaskPattern{observed});
}

void write_partition(const std::string& path, const MissingnessPartition& part, Index n) {
  std::vector<bool> observed(static_cast<std::size_t>(n), false);
  for (Index bau : part.observed) observed[static_cast<std::size_t>(bau)] = true;
  AtomicFile file(path);
  file.stream() << "bau_id,observed\n";
  for (Index j = 0; j < n; ++j) {
    file.stream() << j << ',' << (observed[static_cast<std::size_t>(j)] ? 1 : 0) << '\n';
  }
  file.commit();
}

MaskPattern load_partition_mask(const std::string& path, Index n) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "bau_id,observed", path);
  MaskPattern mask;
  mask.observed.assign(static_cast<std::size_t>(n), false);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    const long bau = parse_long(fields[0], path, line_no);
    if (bau < 0 || bau >= n) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bau_id out of range");
    }
    if (seen[static_cast<std::size_t>(bau)]) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate bau_id");
    }
    seen[static_cast<std::size_t>(bau)] = true;
    mask.observed[static_cast<std::size_t>(bau)] = parse_long(fields[1], path, line_no) != 0;
  }
  return mask;
}

std::vector<bool> load_grid_mask(const std::string& path, Index cells) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "cell,included", path);
  std::vector<bool> included(static_cast<std::size_t>(cells), false);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    const long cell = parse_long(fields[0], path, line_no);
    if (cell < 0 || cell >= cells) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": cell out of range");
    }
    included[static_cast<std::size_t>(cell)] = parse_long(fields[1], path, line_no) != 0;
  }
  return included;
}

void run_study(const ScenarioSpec& spec, const BAUGrid& grid, const MissingnessPartition& part,
               const SreCovariance& full_cov, const Matrix& e, const std::string& out_dir,
               int workers) {
  std::filesystem::create_directories(out_dir);
  const double sigma_o = spec.model.measurement_error ? spec.sigma_o_value() : 0.0;
  std::vector<std::string> errors(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, workers, [&](Index r) {
    const SimulatedReplicate rep =
        simulate_replicate(spec, full_cov, e, part, static_cast<int>(r) + 1);
    const std::string tag = std::to_string(r + 1);
    {
      AtomicFile truth(out_dir + "/truth_r" + tag + ".csv");
      truth.stream() << "bau_id,y\n";
      for (Index j = 0; j < rep.y.size(); ++j) {
        truth.stream() << j << ',' << format_double(rep.y(j)) << '\n';
      }
      truth.commit();
    }
    {
      AtomicFile data(out_dir + "/data_r" + tag + ".csv");
      data.stream() << "bau_id,z,sigma_o\n";
      for (std::size_t i = 0; i < part.observed.size(); ++i) {
        data.stream() << part.observed[i] << ',' << format_double(rep.z(static_cast<Index>(i)))
                      << ',' << format_double(sigma_o) << '\n';
      }
      data.commit();
    }
  });
}

Vector load_truth(const std::string& path, Index n) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "bau_id,y", path);
  Vector y = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    const long bau = parse_long(fields[0], path, line_no);
    if (bau < 0 || bau >= n) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bau_id out of range");
    }
    y(bau) = parse_double(fields[1], path, line_no);
  }
  if (!y.allFinite()) throw std::runtime_error(path + ": truth does not cover every BAU");
  return y;
}

DrawTable load_draw_table(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "iteration") {
    throw std::runtime_error(path + ": expected an 'iteration,...' header");
  }
  DrawTable table;
  table.columns.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": field count mismatch");
    }
    table.iterations.push_back(parse_long(fields[0], path, line_no));
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      row.push_back(parse_double(fields[i], path, line_no));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return table;
}

namespace {
void write_draw_csv(const std::string& path, const std::vector<std::string>& columns,
                    const Matrix& values, long burn_in, long thin, const Vector* extra = nullptr,
                    const std::string& extra_name = "") {
  AtomicFile file(path);
  file.stream() << "iteration";
  for (const auto& c : columns) file.stream() << ',' << c;
  if (extra != nullptr) file.stream() << ',' << extra_name;
  file.stream() << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    file.stream() << (burn_in + r * thin);
    for (Index c = 0; c < values.cols(); ++c) file.stream() << ',' << format_double(values(r, c));
    if (extra != nullptr) file.stream() << ',' << format_double((*extra)(r));
    file.stream() << '\n';
  }
  file.commit();
}
}  // namespace

void write_chain_output(const std::string& dir, const ChainOutput& output,
                        const MissingnessPartition& part) {
  std::filesystem::create_directories(dir);
  write_draw_csv(dir + "/params.csv", output.param_names, output.theta, output.burn_in,
                 output.thin);

  std::vector<std::string> eta_names;
  for (Index c = 0; c < output.eta.cols(); ++c) {
    eta_names.push_back("eta_" + std::to_string(c + 1));
  }
  if (output.gamma.size() > 0) {
    write_draw_csv(dir + "/eta.csv", eta_names, output.eta, output.burn_in, output.thin,
                   &output.gamma, "gamma");
  } else {
    write_draw_csv(dir + "/eta.csv", eta_names, output.eta, output.burn_in, output.thin);
  }

  std::vector<std::string> obs_names;
  for (Index idx : output.obs_ids) {
    obs_names.push_back("bau_" + std::to_string(part.observed[static_cast<std::size_t>(idx)]));
  }
  write_draw_csv(dir + "/y_obs.csv", obs_names, output.y_obs, output.burn_in, output.thin);

  if (output.y_miss.cols() > 0) {
    std::vector<std::string> miss_names;
    for (Index idx : output.miss_ids) {
      miss_names.push_back("bau_" + std::to_string(part.missing[static_cast<std::size_t>(idx)]));
    }
    write_draw_csv(dir + "/y_miss.csv", miss_names, output.y_miss, output.burn_in, output.thin);
  }

  std::vector<std::pair<std::string, std::string>> entries;
  entries.emplace_back("theta_acceptance", format_double(output.theta_acceptance));
  entries.emplace_back("latent_acceptance", format_double(output.latent_acceptance));
  entries.emplace_back("theta_scale", format_double(output.theta_scale));
  entries.emplace_back("clamp_events", std::to_string(output.clamp_events));
  entries.emplace_back("seconds", format_double(output.seconds));
  entries.emplace_back("iterations", std::to_string(output.iterations));
  entries.emplace_back("burn_in", std::to_string(output.burn_in));
  entries.emplace_back("thin", std::to_string(output.thin));
  for (const auto& w : output.warnings) entries.emplace_back("warning", w);
  write_key_values(dir + "/acceptance.txt", entries);
}

void write_predictions(const std::string& path, const std::vector<PredictionRow>& rows) {
  AtomicFile file(path);
  file.stream() << "bau_id,observed,mean,psd,lo,hi\n";
  for (const auto& r : rows) {
    file.stream() << r.bau_id << ',' << (r.observed ? 1 : 0) << ',' << format_double(r.mean)
                  << ',' << format_double(r.psd) << ',' << format_double(r.lo) << ','
                  << format_double(r.hi) << '\n';
  }
  file.commit();
}

std::vector<PredictionRow> load_predictions(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  expect_header(line, "bau_id,observed,mean,psd,lo,hi", path);
  std::vector<PredictionRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 6 fields");
    }
    PredictionRow row;
    row.bau_id = parse_long(fields[0], path, line_no);
    row.observed = parse_long(fields[1], path, line_no) != 0;
    row.mean = parse_double(fields[2], path, line_no);
    row.psd = parse_double(fields[3], path, line_no);
    row.lo = parse_double(fields[4], path, line_no);
    row.hi = parse_double(fields[5], path, line_no);
    rows.push_back(row);
  }
  return rows;
}

void write_summaries(const std::string& path, const std::vector<PosteriorSummary>& summaries,
                     const std::vector<double>& r_hat) {
  if (!r_hat.empty() && r_hat.size() != summaries.size()) {
    throw std::invalid_argument("write_summaries: r_hat size mismatch");
  }
  AtomicFile file(path);
  file.stream() << "parameter,mean,sd,q025,q50,q975,ess";
  if (!r_hat.empty()) file.stream() << ",r_hat";
  file.stream() << '\n';
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    file.stream() << s.name << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ','
                  << format_double(s.q025) << ',' << format_double(s.q50) << ','
                  << format_double(s.q975) << ',' << format_double(s.ess);
    if (!r_hat.empty()) file.stream() << ',' << format_double(r_hat[i]);
    file.stream() << '\n';
  }
  file.commit();
}

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows) {
  AtomicFile file(path);
  file.stream() << "bau_id,observed,rmspe,ec\n";
  for (const auto& r : rows) {
    file.stream() << r.bau_id << ',' << (r.observed ? 1 : 0) << ',' << format_double(r.rmspe)
                  << ',' << format_double(r.ec) << '\n';
  }
  file.commit();
}

void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
  AtomicFile file(path);
  for (const auto& [key, value] : entries) file.stream() << key << ' ' << value << '\n';
  file.commit();
}

}  // namespace srecop
