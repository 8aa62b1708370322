#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace srecop {

/// Run configuration: a flat, sectioned, key-value text format.
///
///   # comment
///   [section]
///   key = value
///
/// Values run to the end of line (inline # comments stripped). The schema is
/// validated on load: unknown sections or keys are rejected before any
/// compute happens.
class RunConfig {
 public:
  static RunConfig load(const std::string& path);
  static RunConfig parse(std::istream& in, const std::string& origin = "<config>");

  bool has(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// whitespace-separated numeric list
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  void validate(const std::string& origin) const;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace srecop
