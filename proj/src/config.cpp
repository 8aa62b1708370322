#include "srecop/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace srecop {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid",
       {"x_min", "x_max", "y_min", "y_max", "nx", "ny", "metric", "dist_scale", "mask_file"}},
      {"missing",
       {"pattern", "prob", "observed_count", "seed", "blocks", "mask_file"}},
      {"basis", {"counts", "apertures", "kernel", "centers_file"}},
      {"model", {"family"}},
      {"priors", {"sigma_p", "beta0", "lambda", "theta_s", "theta_r", "nu"}},
      {"mcmc",
       {"iterations", "burn_in", "thin", "seed", "workers", "adapt", "tabulate_sg",
        "predict_missing", "store_bau"}},
      {"data", {"path", "retrievals"}},
      {"output", {"dir"}},
      {"simulate",
       {"model", "beta0", "sigma_p", "lambda", "theta_s", "theta_r", "nu", "sigma_o",
        "sigma_o_rule", "replicates", "seed"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse(in, path);
}

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  RunConfig config;
  std::string line;
  std::string section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      config.sections_[section];  // section may legitimately stay empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected 'key = value' inside a [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (config.sections_[section].count(key) > 0) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                               key + "' in [" + section + "]");
    }
    config.sections_[section][key] = value;
  }
  config.validate(origin);
  return config;
}

void RunConfig::validate(const std::string& origin) const {
  for (const auto& [section, entries] : sections_) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      throw std::runtime_error(origin + ": unknown section [" + section + "]");
    }
    for (const auto& [key, value] : entries) {
      if (it->second.count(key) == 0) {
        throw std::runtime_error(origin + ": unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

const std::string& RunConfig::require(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end() || it->second.count(key) == 0) {
    throw std::runtime_error("config: missing required key '" + key + "' in [" + section + "]");
  }
  return it->second.at(key);
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double RunConfig::require_double(const std::string& section, const std::string& key) const {
  const std::string& text = require(section, key);
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) {
    throw std::runtime_error("config: [" + section + "] " + key + " is not a number: " + text);
  }
  return value;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? require_double(section, key) : fallback;
}

long RunConfig::get_long(const std::string& section, const std::string& key, long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& text = require(section, key);
  std::size_t used = 0;
  const long value = std::stol(text, &used);
  if (used != text.size()) {
    throw std::runtime_error("config: [" + section + "] " + key + " is not an integer: " + text);
  }
  return value;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& text = require(section, key);
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw std::runtime_error("config: [" + section + "] " + key + " is not a boolean: " + text);
}

std::vector<double> RunConfig::get_doubles(const std::string& section,
                                           const std::string& key) const {
  std::vector<double> values;
  if (!has(section, key)) return values;
  std::istringstream in(require(section, key));
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) {
    throw std::runtime_error("config: [" + section + "] " + key + " is not a numeric list");
  }
  return values;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto it = schema().find(section);
  if (it == schema().end() || it->second.count(key) == 0) {
    throw std::runtime_error("config: cannot set unknown key [" + section + "] " + key);
  }
  sections_[section][key] = value;
}

}  // namespace srecop
