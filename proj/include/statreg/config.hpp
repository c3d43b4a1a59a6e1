#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace statreg {

/// Flat "key = value" text configuration. Lines starting with '#' and blank lines are
/// ignored; keys are namespaced with dots (operator.kind, schedule.eta, ...).
class FlatConfig {
 public:
  static FlatConfig parse(std::istream& in);
  static FlatConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Keys not listed in `known`; used to reject typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace statreg
