#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "harness/config.hpp"
#include "json.hpp"

namespace superrad::harness {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "SUPERRAD_OUTPUT_ROOT";

struct RunOptions {
  std::filesystem::path out_root = "results";
  bool force = false;
  unsigned jobs = 1;
  std::ostream* log = nullptr;
};

struct RunResult {
  std::filesystem::path dir;
  bool cache_hit = false;
  nlohmann::json manifest;
};

// --out flag, then the environment override, then [experiment] output,
// then ./results.
std::filesystem::path resolve_output_root(const std::optional<std::string>& flag, const ExperimentConfig& cfg);

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

struct MeasureRequest {
  std::optional<int> n_atoms;
  std::string state = "ground";
  double gamma_over_g = 0.0;
  std::optional<double> window;
  int grid_points = 21;
  unsigned jobs = 1;
};

// dicke:J,M | dephased:J,M,lambda | mixture:p0,p1,... | factorized:ree,re[,im]
// | ground. Atom count comes from the state or from `n_atoms`; both must
// agree when given.
InitialState parse_state_flag(const std::string& text, std::optional<int> n_atoms);

nlohmann::json measure(const MeasureRequest& request);

}  // namespace superrad::harness
