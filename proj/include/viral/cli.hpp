#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "viral/model.hpp"

namespace viral {

/// Fully resolved run configuration. Defaults, then a --config file, then
/// command-line flags.
struct RunConfig {
  std::string command;
  ModelParams params;
  // majority | majority-signal | family:<p> | path to a strategy JSON
  std::string strategy = "majority";
  std::int64_t runs = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::filesystem::path out_dir = ".";
  bool svg = false;

  int path_points = 0;                       // simulate
  std::vector<double> p_grid;                // equilibrium: mixing solve when nonempty
  std::vector<std::int64_t> n_schedule;      // equilibrium: horizons, default {n}
  std::optional<int> pivot;                  // equilibrium: family pivot cell
  std::vector<double> lambda_grid;           // design
  std::vector<std::string> objectives = {"accuracy", "agreement"};
  std::map<double, std::string> equilibria;  // design: lambda -> strategy spec
  std::string estimator = "steady_state";    // design
  std::vector<double> iota_grid;             // robustness
  std::vector<double> q_grid = {0.51, 0.55, 0.6, 0.7, 0.8, 0.9};  // statics
  int k_max = 10;                                                  // statics
};

// The config block embedded in every artifact. The output directory and the
// thread count are left out: neither changes any result.
nlohmann::json config_to_json(const RunConfig& cfg);
// Applies the keys present in j over cfg; unknown keys and bad types throw
// ParameterError naming the field.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

// Checks parameters and referenced files before any work starts.
void validate_config(const RunConfig& cfg);

Strategy resolve_strategy(const std::string& spec, const ModelParams& params, std::optional<int> pivot = std::nullopt);

// Runs one subcommand; returns the exit status (0, 2 on validation errors,
// 3 on numerical-resolution failures).
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and executes; VIRAL_OUT_DIR sets the default output directory.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace viral
