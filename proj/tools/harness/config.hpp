#pragma once

// Experiment configuration: a strict key = value schema in INI sections,
// resolved against per-experiment defaults and canonicalized for hashing.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superrad/dynamics.hpp"
#include "superrad/errors.hpp"
#include "superrad/model.hpp"

namespace superrad::harness {

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

struct ExperimentInfo {
  std::string id;
  std::string summary;
};

const std::vector<ExperimentInfo>& experiment_catalog();

class ExperimentConfig {
 public:
  // Parses INI text; `source` names the origin in diagnostics.
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<config>");
  static ExperimentConfig load(const std::string& path);
  // Defaults of one experiment with no overrides.
  static ExperimentConfig defaults(const std::string& id);

  const std::string& id() const { return id_; }

  // "section.key=value" lines in sorted order, excluding output routing.
  std::string canonical_text() const;
  std::string hash() const;

  bool has(const std::string& key) const { return values_.contains(key); }
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::optional<std::string> output_dir() const;

  // Typed views, validated at parse time.
  SystemSpec system() const;
  SystemSpec system_for(int n_atoms, double gamma_over_g) const;
  InitialState state() const;
  IntegratorConfig integrator() const;

  // Overrides one key with schema checks (used by tests and sweeps).
  void set(const std::string& key, const std::string& value);

 private:
  void validate() const;

  std::string id_;
  std::map<std::string, std::string> values_;
};

}  // namespace superrad::harness
